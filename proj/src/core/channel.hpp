#ifndef RISO_CHANNEL_HPP
#define RISO_CHANNEL_HPP

#include <complex>
#include <vector>

#include "config.hpp"
#include "rng.hpp"

namespace riso {

using cd = std::complex<double>;

struct DimensionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ModelAssumptionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Time-domain taps for one coherence block.
struct ChannelRealization {
    int L0 = 0, L1 = 0, L2 = 0, K = 0, M = 0, N_t = 0;
    std::vector<cd> h_d;  // [L0][K][N_t] direct taps
    std::vector<cd> G;    // [L1][M][N_t] BS->RIS taps
    std::vector<cd> r;    // [L2][K][M] RIS->user taps
    Geometry geometry;

    cd& hd(int l, int k, int t) { return h_d[(l * K + k) * N_t + t]; }
    cd hd(int l, int k, int t) const { return h_d[(l * K + k) * N_t + t]; }
    cd& g(int l, int m, int t) { return G[(l * M + m) * N_t + t]; }
    cd g(int l, int m, int t) const { return G[(l * M + m) * N_t + t]; }
    cd& ru(int l, int k, int m) { return r[(l * K + k) * M + m]; }
    cd ru(int l, int k, int m) const { return r[(l * K + k) * M + m]; }
};

// Per-subcarrier direct and cascaded channels after the DFT.
struct FrequencyChannel {
    int N = 0, K = 0, M = 0, N_t = 0;
    std::vector<cd> hd_f;  // [N][K][N_t]
    std::vector<cd> hr_f;  // [N][K][M][N_t]
    Geometry geometry;

    cd& hd(int n, int k, int t) { return hd_f[(n * K + k) * N_t + t]; }
    cd hd(int n, int k, int t) const { return hd_f[(n * K + k) * N_t + t]; }
    cd& hr(int n, int k, int m, int t) {
        return hr_f[((n * K + k) * M + m) * N_t + t];
    }
    cd hr(int n, int k, int m, int t) const {
        return hr_f[((n * K + k) * M + m) * N_t + t];
    }
};

// h_eff(q,n,k,:) = hd_f(n,k,:) + sum_m e^{j theta(m,q)} hr_f(n,k,m,:)
struct EffectiveChannel {
    int Q = 0, N = 0, K = 0, N_t = 0;
    std::vector<cd> h;  // [Q][N][K][N_t]

    cd& at(int q, int n, int k, int t) {
        return h[((q * N + n) * K + k) * N_t + t];
    }
    cd at(int q, int n, int k, int t) const {
        return h[((q * N + n) * K + k) * N_t + t];
    }
};

ChannelRealization sample_taps(const ScenarioConfig& cfg, const Geometry& geo,
                               RandomStream& rng);

// linear convolution over tap index of diag(r_i) with G_{l-i};
// output extent [L1+L2-1][K][M][N_t]
std::vector<cd> cascade_taps(const ChannelRealization& ch);

FrequencyChannel to_frequency(const ChannelRealization& ch,
                              const ScenarioConfig& cfg);

// theta: [M][Q] radians, theta[m*Q+q]
EffectiveChannel effective_channel(const FrequencyChannel& fc,
                                   const std::vector<double>& theta, int Q);

} // namespace riso

#endif
