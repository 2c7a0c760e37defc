#ifndef RISO_BASELINES_HPP
#define RISO_BASELINES_HPP

#include <string>

#include "training.hpp"

namespace riso {

enum class BaselineKind { RandomRis, RandomAllocation, WithoutRis, FixedAllocation };

BaselineKind baseline_from_tag(const std::string& tag);
std::string baseline_tag(BaselineKind kind);

// random_ris: theta uniform over {0, pi}, AllocationNet supplies alpha;
// random_allocation: uniform one-hot alpha, BeamNet supplies theta;
// without_ris: M = 0 (effective channel is the direct channel);
// fixed_allocation: timeslot 0's (theta, alpha) repeated across all Q.
std::pair<Decision, RateReport> run_baseline(BaselineKind kind,
                                             const FrequencyChannel& fc,
                                             ModelParameters* params,
                                             const ScenarioConfig& cfg,
                                             RandomStream& rng);

struct OracleResult {
    std::vector<double> theta;  // [M][Q], entries in {0, pi}
    std::vector<double> alloc;  // [N][K][Q] one-hot
    RateReport report;
};

// Enumerates every binary phase matrix and every one-hot allocation and
// returns the sum-rate maximizer; tie goes to the lexicographically smallest
// encoding. Guarded to 2^(M*Q) * K^(N*Q) <= 10^7 candidates.
OracleResult exhaustive_oracle(const FrequencyChannel& fc,
                               const ScenarioConfig& cfg,
                               bool qos_feasible_only = false);

// disk cache keyed by (config hash, realization id); returns the cached
// result or computes and stores it
OracleResult exhaustive_oracle_cached(const FrequencyChannel& fc,
                                      const ScenarioConfig& cfg,
                                      const std::string& cache_dir,
                                      int realization_id);

} // namespace riso

#endif
