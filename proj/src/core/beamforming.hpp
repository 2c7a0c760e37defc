#ifndef RISO_BEAMFORMING_HPP
#define RISO_BEAMFORMING_HPP

#include <vector>

#include "channel.hpp"

namespace riso {

struct NoSignalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// MRT direction + water-filling power per timeslot.
struct BeamformingSolution {
    int Q = 0, N = 0, N_t = 0;
    std::vector<cd> directions;       // [Q][N][N_t] unit vectors
    std::vector<double> powers;       // [Q][N] linear mW
    std::vector<double> water_levels; // [Q]
    std::vector<int> serving_user;    // [Q][N], -1 if unassigned
    bool degenerate = false;          // some served channel had zero norm

    cd dir(int q, int n, int t) const {
        return directions[(size_t(q) * N + n) * N_t + t];
    }
    double power(int q, int n) const { return powers[size_t(q) * N + n]; }
    int served(int q, int n) const { return serving_user[size_t(q) * N + n]; }
};

struct RateReport {
    std::vector<double> per_user;   // [K] bits/s
    double sum_rate = 0.0;          // bits/s
    std::vector<double> per_rb;     // [Q][N] bits/s
    std::vector<double> snr;        // [Q][N][K] linear, for gradient reuse
};

// w = h^H / ||h||; zero channel yields the zero vector plus a flag
std::vector<cd> mrt_direction(const std::vector<cd>& h, bool* degenerate = nullptr);

// active-set water-filling: powers(n) = (wl - 1/c(n))^+, sum = P_max exactly;
// entries with c(n) = 0 are excluded and get zero power
struct WaterFillResult {
    std::vector<double> powers;
    double water_level = 0.0;
};
WaterFillResult water_fill(const std::vector<double>& c, double p_max);

// alloc: [N][K][Q] soft or one-hot weights, alloc[(n*K+k)*Q+q]
BeamformingSolution solve_beamforming(const EffectiveChannel& eff,
                                      const std::vector<double>& alloc,
                                      const ScenarioConfig& cfg);

RateReport compute_rates(const EffectiveChannel& eff,
                         const std::vector<double>& alloc,
                         const BeamformingSolution& sol,
                         const ScenarioConfig& cfg);

} // namespace riso

#endif
