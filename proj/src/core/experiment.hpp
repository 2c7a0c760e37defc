#ifndef RISO_EXPERIMENT_HPP
#define RISO_EXPERIMENT_HPP

#include <string>
#include <vector>

#include "baselines.hpp"

namespace riso {

// Evaluation schemes: "trained" (discrete pipeline), "continuous" (no
// quantization in BeamNet), the baseline tags, and "oracle" (tiny scale only).
EvalMetrics evaluate_scheme(const std::string& scheme, ModelParameters* params,
                            const Dataset& dataset, const ScenarioConfig& cfg,
                            std::uint64_t scheme_seed,
                            const std::string& oracle_cache_dir = "");

struct ExperimentRow {
    std::string scheme;
    double axis = 0.0;
    EvalMetrics metrics;
};

struct ExperimentResult {
    std::string axis_name;
    std::vector<ExperimentRow> rows;
    std::string config_snapshot;
};

// apply one sweep-axis value to a copy of the config
ScenarioConfig apply_axis(const ScenarioConfig& cfg, const std::string& axis,
                          double value);

// Evaluates every scheme at every axis value on a freshly generated
// evaluation set (shared across schemes at each value). Learned schemes load
// checkpoints from checkpoint_dir: "model_<axis>_<value>.ckpt" if present,
// else "model.ckpt".
ExperimentResult run_experiment(const ScenarioConfig& cfg,
                                const std::string& axis,
                                const std::vector<double>& values,
                                const std::vector<std::string>& schemes,
                                const std::string& checkpoint_dir,
                                int eval_count, std::uint64_t eval_seed);

// metrics.csv: scheme, axis, mean_sum_rate_mbps, rate_5pct_mbps, qos_fraction
// timings.csv: scheme, axis, latency_ms (kept apart so metric tables are
// reproducible bit-exactly under a fixed seed)
void write_metrics(const ExperimentResult& result, const std::string& dir);
ExperimentResult parse_metrics(const std::string& csv_path);

// one rate-vs-axis curve per scheme
void emit_metrics_plot(const std::string& metrics_csv, const std::string& out_svg);
// loss-vs-iteration curves with stage-boundary markers
void emit_history_plot(const std::string& history_path, const std::string& out_svg);

} // namespace riso

#endif
