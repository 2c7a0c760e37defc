#ifndef RISO_TRAINING_HPP
#define RISO_TRAINING_HPP

#include <optional>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "networks.hpp"
#include "objective.hpp"

namespace riso {

enum class UpdateTarget { BeamNet, AllocationNet, Joint };

struct HistoryRecord {
    int iteration = 0;
    int stage = 0;  // 1..5, or 0 for joint-from-scratch runs
    double rate_term = 0.0, qos_term = 0.0, reg_term = 0.0, total = 0.0;
    std::optional<double> val_loss;
};

struct TrainHistory {
    std::vector<HistoryRecord> records;
    void save(const std::string& path) const;  // delimited text
};

struct EvalMetrics {
    double mean_sum_rate_mbps = 0.0;
    std::vector<double> per_user_mbps;   // mean per-user rates
    double rate_5pct_mbps = 0.0;         // 5th pct of pooled per-user rates
    double qos_satisfaction = 0.0;       // fraction of (realization, user)
    double inference_latency_ms = 0.0;   // wall-clock per forward pipeline
    std::vector<double> sum_rates_mbps;  // per realization, for bootstrap
};

// One full soft-mode pipeline pass over a batch with the gradient path of the
// custom loss. Beamformer decisions (serving user, water-filled powers, MRT
// directions) are held fixed in the backward pass; the soft allocation and
// phase relaxations carry the gradients.
struct PipelineResult {
    std::vector<LossBreakdown> per_sample;
    double batch_total = 0.0;
};

PipelineResult train_step(const std::vector<const FrequencyChannel*>& batch,
                          ModelParameters& params, UpdateTarget which,
                          Adam* optimizer, const ScenarioConfig& cfg,
                          RandomStream& rng);

// forward-only soft-mode loss over a set, for validation curves
double soft_loss(const std::vector<const FrequencyChannel*>& set,
                 ModelParameters& params, const ScenarioConfig& cfg,
                 RandomStream& rng);

// Five-stage phased schedule: BeamNet / AllocationNet alternate, then joint.
TrainHistory phased_train(const Dataset& train_set, const Dataset& val_set,
                          ModelParameters& params, const ScenarioConfig& cfg,
                          RandomStream& rng);

// joint updates from scratch for the same N5 iterations (comparison run)
TrainHistory joint_train(const Dataset& train_set, const Dataset& val_set,
                         ModelParameters& params, const ScenarioConfig& cfg,
                         RandomStream& rng);

int stage_of_iteration(int it, const ScenarioConfig& cfg);

// hard-mode evaluation: hard quantization, argmax allocation, no noise
EvalMetrics evaluate(ModelParameters& params, const Dataset& dataset,
                     const ScenarioConfig& cfg);

// decision bundle for one realization under some scheme
struct Decision {
    std::vector<double> theta;  // [M][Q]
    std::vector<double> alloc;  // [N][K][Q]
};

// hard-mode forward for one realization
Decision infer_hard(ModelParameters& params, const FrequencyChannel& fc,
                    const ScenarioConfig& cfg);

double percentile_low(std::vector<double> values, double pct);

} // namespace riso

#endif
