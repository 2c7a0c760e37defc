#include "beamforming.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace riso {

std::vector<cd> mrt_direction(const std::vector<cd>& h, bool* degenerate) {
    double nrm2 = 0.0;
    for (const cd& v : h) nrm2 += std::norm(v);
    std::vector<cd> w(h.size(), cd(0, 0));
    if (nrm2 <= 0.0) {
        if (degenerate) *degenerate = true;
        return w;
    }
    if (degenerate) *degenerate = false;
    double inv = 1.0 / std::sqrt(nrm2);
    for (size_t t = 0; t < h.size(); ++t) w[t] = std::conj(h[t]) * inv;
    return w;
}

WaterFillResult water_fill(const std::vector<double>& c, double p_max) {
    int n = int(c.size());
    std::vector<int> active;
    for (int i = 0; i < n; ++i) {
        if (c[i] < 0.0)
            throw std::invalid_argument("water_fill: gains must be >= 0");
        if (c[i] > 0.0) active.push_back(i);
    }
    if (active.empty()) throw NoSignalError("water_fill: all gains are zero");
    if (p_max <= 0.0)
        throw std::invalid_argument("water_fill: P_max must be positive");

    // peel off carriers with the largest 1/c until every active power is >= 0
    std::sort(active.begin(), active.end(),
              [&](int a, int b) { return c[a] > c[b]; });
    double inv_sum = 0.0;
    for (int i : active) inv_sum += 1.0 / c[i];
    int m = int(active.size());
    double wl = 0.0;
    while (m > 0) {
        wl = (p_max + inv_sum) / m;
        double worst = 1.0 / c[active[m - 1]];
        if (wl > worst) break;
        inv_sum -= worst;
        --m;
    }
    WaterFillResult res;
    res.powers.assign(n, 0.0);
    res.water_level = wl;
    for (int i = 0; i < m; ++i)
        res.powers[active[i]] = wl - 1.0 / c[active[i]];
    return res;
}

BeamformingSolution solve_beamforming(const EffectiveChannel& eff,
                                      const std::vector<double>& alloc,
                                      const ScenarioConfig& cfg) {
    const int Q = eff.Q, N = eff.N, K = eff.K, Nt = eff.N_t;
    if (alloc.size() != size_t(N) * K * Q)
        throw DimensionError("solve_beamforming: alloc must be N x K x Q");
    BeamformingSolution sol;
    sol.Q = Q;
    sol.N = N;
    sol.N_t = Nt;
    sol.directions.assign(size_t(Q) * N * Nt, cd(0, 0));
    sol.powers.assign(size_t(Q) * N, 0.0);
    sol.water_levels.assign(Q, 0.0);
    sol.serving_user.assign(size_t(Q) * N, -1);

    std::vector<cd> h(Nt);
    for (int q = 0; q < Q; ++q) {
        std::vector<double> gains(N, 0.0);
        bool any = false;
        for (int n = 0; n < N; ++n) {
            // serving user = argmax_k alloc; unassigned subcarriers (all-zero
            // rows) are excluded from water-filling
            int kbest = -1;
            double best = 0.0;
            double rowsum = 0.0;
            for (int k = 0; k < K; ++k) {
                double a = alloc[(size_t(n) * K + k) * Q + q];
                rowsum += a;
                if (kbest < 0 || a > best) {
                    best = a;
                    kbest = k;
                }
            }
            if (rowsum <= 0.0) continue;
            sol.serving_user[size_t(q) * N + n] = kbest;
            for (int t = 0; t < Nt; ++t) h[t] = eff.at(q, n, kbest, t);
            bool deg = false;
            std::vector<cd> dir = mrt_direction(h, &deg);
            if (deg) sol.degenerate = true;
            for (int t = 0; t < Nt; ++t)
                sol.directions[(size_t(q) * N + n) * Nt + t] = dir[t];
            double nrm2 = 0.0;
            for (int t = 0; t < Nt; ++t) nrm2 += std::norm(h[t]);
            gains[n] = nrm2 / cfg.sigma2_mw;
            if (gains[n] > 0.0) any = true;
        }
        if (!any)
            throw NoSignalError("solve_beamforming: timeslot " +
                                std::to_string(q) + " has no usable channel");
        WaterFillResult wf = water_fill(gains, cfg.p_max_mw);
        sol.water_levels[q] = wf.water_level;
        for (int n = 0; n < N; ++n) sol.powers[size_t(q) * N + n] = wf.powers[n];
    }
    return sol;
}

RateReport compute_rates(const EffectiveChannel& eff,
                         const std::vector<double>& alloc,
                         const BeamformingSolution& sol,
                         const ScenarioConfig& cfg) {
    const int Q = eff.Q, N = eff.N, K = eff.K, Nt = eff.N_t;
    if (alloc.size() != size_t(N) * K * Q)
        throw DimensionError("compute_rates: alloc must be N x K x Q");
    RateReport rep;
    rep.per_user.assign(K, 0.0);
    rep.per_rb.assign(size_t(Q) * N, 0.0);
    rep.snr.assign(size_t(Q) * N * K, 0.0);
    const double wq = cfg.W / Q;
    for (int q = 0; q < Q; ++q)
        for (int n = 0; n < N; ++n) {
            double p = sol.power(q, n);
            for (int k = 0; k < K; ++k) {
                double gamma = 0.0;
                if (p > 0.0) {
                    cd s(0, 0);
                    for (int t = 0; t < Nt; ++t)
                        s += eff.at(q, n, k, t) * sol.dir(q, n, t);
                    gamma = p * std::norm(s) / cfg.sigma2_mw;
                }
                rep.snr[(size_t(q) * N + n) * K + k] = gamma;
                double a = alloc[(size_t(n) * K + k) * Q + q];
                if (a != 0.0) {
                    double rb = wq * a * std::log2(1.0 + gamma);
                    rep.per_user[k] += rb;
                    rep.per_rb[size_t(q) * N + n] += rb;
                }
            }
        }
    rep.sum_rate = std::accumulate(rep.per_user.begin(), rep.per_user.end(), 0.0);
    return rep;
}

} // namespace riso
