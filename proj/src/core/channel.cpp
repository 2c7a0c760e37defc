#include "channel.hpp"

#include <cmath>

namespace riso {

namespace {

// half-wavelength ULA response, unit-modulus entries
cd steer(int idx, double sin_angle) {
    double ph = M_PI * idx * sin_angle;
    return {std::cos(ph), std::sin(ph)};
}

} // namespace

ChannelRealization sample_taps(const ScenarioConfig& cfg, const Geometry& geo,
                               RandomStream& rng) {
    ChannelRealization ch;
    ch.L0 = cfg.L0;
    ch.L1 = cfg.L1;
    ch.L2 = cfg.L2;
    ch.K = cfg.K;
    ch.M = cfg.M;
    ch.N_t = cfg.N_t;
    ch.geometry = geo;
    ch.h_d.resize(size_t(cfg.L0) * cfg.K * cfg.N_t);
    ch.G.resize(size_t(cfg.L1) * cfg.M * cfg.N_t);
    ch.r.resize(size_t(cfg.L2) * cfg.K * cfg.M);

    // direct link: Rayleigh, total power split uniformly across L0 taps
    for (int k = 0; k < cfg.K; ++k) {
        double pg = path_gain(geo.d_direct[k], cfg.xi0, cfg);
        double tap_var = pg / cfg.L0;
        for (int l = 0; l < cfg.L0; ++l)
            for (int t = 0; t < cfg.N_t; ++t)
                ch.hd(l, k, t) = rng.cgauss(tap_var);
    }

    if (cfg.M > 0) {
        // BS->RIS: tap 0 LoS (deterministic steering outer product),
        // taps >= 1 NLoS Gaussian; LoS/NLoS total power ratio = k_br_lin
        double pg_br = path_gain(geo.d_br, cfg.xi1, cfg);
        double los_p, nlos_p;
        if (cfg.L1 > 1) {
            los_p = pg_br * cfg.k_br_lin / (cfg.k_br_lin + 1.0);
            nlos_p = pg_br / (cfg.k_br_lin + 1.0) / (cfg.L1 - 1);
        } else {
            los_p = pg_br;
            nlos_p = 0.0;
        }
        // angles from the 2-D geometry; BS array along y, RIS elements along x
        double sin_aod = cfg.D2 / geo.d_br;  // departure toward the RIS
        double sin_aoa = cfg.D1 / geo.d_br;  // arrival at the RIS
        double amp = std::sqrt(los_p);
        for (int m = 0; m < cfg.M; ++m)
            for (int t = 0; t < cfg.N_t; ++t)
                ch.g(0, m, t) = amp * steer(m, sin_aoa) * std::conj(steer(t, sin_aod));
        for (int l = 1; l < cfg.L1; ++l)
            for (int m = 0; m < cfg.M; ++m)
                for (int t = 0; t < cfg.N_t; ++t)
                    ch.g(l, m, t) = rng.cgauss(nlos_p);

        // RIS->user links, same Rician structure with k_ru_lin
        for (int k = 0; k < cfg.K; ++k) {
            double pg_ru = path_gain(geo.d_ru[k], cfg.xi2, cfg);
            double los_ru, nlos_ru;
            if (cfg.L2 > 1) {
                los_ru = pg_ru * cfg.k_ru_lin / (cfg.k_ru_lin + 1.0);
                nlos_ru = pg_ru / (cfg.k_ru_lin + 1.0) / (cfg.L2 - 1);
            } else {
                los_ru = pg_ru;
                nlos_ru = 0.0;
            }
            double sin_dep = (geo.user_x[k]) / geo.d_ru[k];  // departure off the RIS
            double amp_ru = std::sqrt(los_ru);
            for (int m = 0; m < cfg.M; ++m)
                ch.ru(0, k, m) = amp_ru * std::conj(steer(m, sin_dep));
            for (int l = 1; l < cfg.L2; ++l)
                for (int m = 0; m < cfg.M; ++m)
                    ch.ru(l, k, m) = rng.cgauss(nlos_ru);
        }
    }
    return ch;
}

std::vector<cd> cascade_taps(const ChannelRealization& ch) {
    int Lc = ch.L1 + ch.L2 - 1;
    std::vector<cd> out(size_t(Lc) * ch.K * ch.M * ch.N_t, cd(0, 0));
    auto at = [&](int l, int k, int m, int t) -> cd& {
        return out[((size_t(l) * ch.K + k) * ch.M + m) * ch.N_t + t];
    };
    for (int l = 0; l < Lc; ++l)
        for (int i = 0; i < ch.L2; ++i) {
            int lg = l - i;
            if (lg < 0 || lg >= ch.L1) continue;
            for (int k = 0; k < ch.K; ++k)
                for (int m = 0; m < ch.M; ++m) {
                    cd rv = ch.ru(i, k, m);
                    for (int t = 0; t < ch.N_t; ++t)
                        at(l, k, m, t) += rv * ch.g(lg, m, t);
                }
        }
    return out;
}

FrequencyChannel to_frequency(const ChannelRealization& ch,
                              const ScenarioConfig& cfg) {
    int N = cfg.N;
    int L = std::max(ch.L0, ch.L1 + ch.L2 - 1);
    if (L > N)
        throw ModelAssumptionError("to_frequency: max delay taps exceed N");
    FrequencyChannel fc;
    fc.N = N;
    fc.K = ch.K;
    fc.M = ch.M;
    fc.N_t = ch.N_t;
    fc.geometry = ch.geometry;
    fc.hd_f.assign(size_t(N) * ch.K * ch.N_t, cd(0, 0));
    fc.hr_f.assign(size_t(N) * ch.K * ch.M * ch.N_t, cd(0, 0));

    // unnormalized forward DFT kernel e^{-j 2 pi l n / N}
    std::vector<cd> kernel(size_t(N) * N);
    for (int n = 0; n < N; ++n)
        for (int l = 0; l < N; ++l) {
            double ph = -2.0 * M_PI * l * n / N;
            kernel[size_t(n) * N + l] = {std::cos(ph), std::sin(ph)};
        }

    for (int n = 0; n < N; ++n)
        for (int k = 0; k < ch.K; ++k)
            for (int t = 0; t < ch.N_t; ++t) {
                cd acc(0, 0);
                for (int l = 0; l < ch.L0; ++l)
                    acc += ch.hd(l, k, t) * kernel[size_t(n) * N + l];
                fc.hd(n, k, t) = acc;
            }

    if (ch.M > 0) {
        std::vector<cd> casc = cascade_taps(ch);
        int Lc = ch.L1 + ch.L2 - 1;
        auto cat = [&](int l, int k, int m, int t) {
            return casc[((size_t(l) * ch.K + k) * ch.M + m) * ch.N_t + t];
        };
        for (int n = 0; n < N; ++n)
            for (int k = 0; k < ch.K; ++k)
                for (int m = 0; m < ch.M; ++m)
                    for (int t = 0; t < ch.N_t; ++t) {
                        cd acc(0, 0);
                        for (int l = 0; l < Lc; ++l)
                            acc += cat(l, k, m, t) * kernel[size_t(n) * N + l];
                        fc.hr(n, k, m, t) = acc;
                    }
    }
    return fc;
}

EffectiveChannel effective_channel(const FrequencyChannel& fc,
                                   const std::vector<double>& theta, int Q) {
    if (theta.size() != size_t(fc.M) * Q)
        throw DimensionError("effective_channel: theta must be M x Q");
    EffectiveChannel eff;
    eff.Q = Q;
    eff.N = fc.N;
    eff.K = fc.K;
    eff.N_t = fc.N_t;
    eff.h.resize(size_t(Q) * fc.N * fc.K * fc.N_t);
    std::vector<cd> phase(size_t(fc.M) * Q);
    for (int m = 0; m < fc.M; ++m)
        for (int q = 0; q < Q; ++q) {
            double th = theta[size_t(m) * Q + q];
            phase[size_t(m) * Q + q] = {std::cos(th), std::sin(th)};
        }
    for (int q = 0; q < Q; ++q)
        for (int n = 0; n < fc.N; ++n)
            for (int k = 0; k < fc.K; ++k)
                for (int t = 0; t < fc.N_t; ++t) {
                    cd acc = fc.hd(n, k, t);
                    for (int m = 0; m < fc.M; ++m)
                        acc += phase[size_t(m) * Q + q] * fc.hr(n, k, m, t);
                    eff.at(q, n, k, t) = acc;
                }
    return eff;
}

} // namespace riso
