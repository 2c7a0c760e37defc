#include "baselines.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

namespace riso {

BaselineKind baseline_from_tag(const std::string& tag) {
    if (tag == "random_ris") return BaselineKind::RandomRis;
    if (tag == "random_allocation") return BaselineKind::RandomAllocation;
    if (tag == "without_ris") return BaselineKind::WithoutRis;
    if (tag == "fixed_allocation") return BaselineKind::FixedAllocation;
    throw std::invalid_argument("unknown baseline tag: " + tag);
}

std::string baseline_tag(BaselineKind kind) {
    switch (kind) {
        case BaselineKind::RandomRis: return "random_ris";
        case BaselineKind::RandomAllocation: return "random_allocation";
        case BaselineKind::WithoutRis: return "without_ris";
        case BaselineKind::FixedAllocation: return "fixed_allocation";
    }
    return "?";
}

std::pair<Decision, RateReport> run_baseline(BaselineKind kind,
                                             const FrequencyChannel& fc,
                                             ModelParameters* params,
                                             const ScenarioConfig& cfg,
                                             RandomStream& rng) {
    Decision d;
    switch (kind) {
        case BaselineKind::RandomRis: {
            if (!params) throw std::invalid_argument("random_ris needs trained params");
            d.theta.resize(size_t(cfg.M) * cfg.Q);
            for (double& t : d.theta) t = rng.uniform() < 0.5 ? 0.0 : M_PI;
            EffectiveChannel eff = effective_channel(fc, d.theta, cfg.Q);
            Tensor4 xa = features_alloc(eff);
            RandomStream dummy(0);
            d.alloc = params->allocationnet->forward(xa, AllocMode::Hard, cfg.tau,
                                                     dummy, false);
            break;
        }
        case BaselineKind::RandomAllocation: {
            if (!params)
                throw std::invalid_argument("random_allocation needs trained params");
            Tensor4 xb = features_beam(fc);
            d.theta = params->beamnet->forward(xb, PhaseMode::Hard, false);
            d.alloc.assign(size_t(cfg.N) * cfg.K * cfg.Q, 0.0);
            for (int n = 0; n < cfg.N; ++n)
                for (int q = 0; q < cfg.Q; ++q) {
                    int k = int(rng.next_u64() % std::uint64_t(cfg.K));
                    d.alloc[(size_t(n) * cfg.K + k) * cfg.Q + q] = 1.0;
                }
            break;
        }
        case BaselineKind::WithoutRis: {
            d.theta.clear();  // M = 0
            FrequencyChannel direct = fc;
            direct.M = 0;
            direct.hr_f.clear();
            EffectiveChannel eff = effective_channel(direct, {}, cfg.Q);
            if (params) {
                // AllocationNet's input shape does not involve M, so the
                // trained allocator still applies to the direct channel
                Tensor4 xa = features_alloc(eff);
                RandomStream dummy(0);
                d.alloc = params->allocationnet->forward(xa, AllocMode::Hard,
                                                         cfg.tau, dummy, false);
            } else {
                // strongest direct channel per RB
                d.alloc.assign(size_t(cfg.N) * cfg.K * cfg.Q, 0.0);
                for (int n = 0; n < cfg.N; ++n)
                    for (int q = 0; q < cfg.Q; ++q) {
                        int kbest = 0;
                        double best = -1.0;
                        for (int k = 0; k < cfg.K; ++k) {
                            double nrm = 0.0;
                            for (int t = 0; t < cfg.N_t; ++t)
                                nrm += std::norm(eff.at(q, n, k, t));
                            if (nrm > best) {
                                best = nrm;
                                kbest = k;
                            }
                        }
                        d.alloc[(size_t(n) * cfg.K + kbest) * cfg.Q + q] = 1.0;
                    }
            }
            BeamformingSolution sol = solve_beamforming(eff, d.alloc, cfg);
            RateReport rep = compute_rates(eff, d.alloc, sol, cfg);
            return {std::move(d), std::move(rep)};
        }
        case BaselineKind::FixedAllocation: {
            if (!params)
                throw std::invalid_argument("fixed_allocation needs trained params");
            Decision full = infer_hard(*params, fc, cfg);
            d.theta.resize(size_t(cfg.M) * cfg.Q);
            d.alloc.assign(size_t(cfg.N) * cfg.K * cfg.Q, 0.0);
            for (int m = 0; m < cfg.M; ++m)
                for (int q = 0; q < cfg.Q; ++q)
                    d.theta[size_t(m) * cfg.Q + q] = full.theta[size_t(m) * cfg.Q];
            for (int n = 0; n < cfg.N; ++n)
                for (int k = 0; k < cfg.K; ++k)
                    for (int q = 0; q < cfg.Q; ++q)
                        d.alloc[(size_t(n) * cfg.K + k) * cfg.Q + q] =
                            full.alloc[(size_t(n) * cfg.K + k) * cfg.Q];
            break;
        }
    }
    EffectiveChannel eff = effective_channel(fc, d.theta, cfg.Q);
    BeamformingSolution sol = solve_beamforming(eff, d.alloc, cfg);
    RateReport rep = compute_rates(eff, d.alloc, sol, cfg);
    return {std::move(d), std::move(rep)};
}

OracleResult exhaustive_oracle(const FrequencyChannel& fc,
                               const ScenarioConfig& cfg,
                               bool qos_feasible_only) {
    const int M = fc.M, N = fc.N, K = cfg.K, Q = cfg.Q;
    double phase_count = std::pow(2.0, double(M) * Q);
    double alloc_count = std::pow(double(K), double(N) * Q);
    if (phase_count * alloc_count > 1e7)
        throw std::invalid_argument(
            "exhaustive_oracle: search space 2^(M*Q) * K^(N*Q) = " +
            std::to_string(phase_count * alloc_count) +
            " exceeds the 1e7 guard; shrink M, N, K or Q");
    std::uint64_t n_phase = std::uint64_t(phase_count);
    std::uint64_t n_alloc = std::uint64_t(alloc_count);

    OracleResult best;
    bool have_best = false;
    double best_rate = -1.0;
    std::vector<double> theta(size_t(M) * Q);
    std::vector<double> alloc(size_t(N) * K * Q);
    for (std::uint64_t pi = 0; pi < n_phase; ++pi) {
        for (int i = 0; i < M * Q; ++i)
            theta[i] = (pi >> i) & 1 ? M_PI : 0.0;
        EffectiveChannel eff = effective_channel(fc, theta, Q);
        for (std::uint64_t ai = 0; ai < n_alloc; ++ai) {
            std::fill(alloc.begin(), alloc.end(), 0.0);
            std::uint64_t code = ai;
            for (int n = 0; n < N; ++n)
                for (int q = 0; q < Q; ++q) {
                    int k = int(code % K);
                    code /= K;
                    alloc[(size_t(n) * K + k) * Q + q] = 1.0;
                }
            BeamformingSolution sol = solve_beamforming(eff, alloc, cfg);
            RateReport rep = compute_rates(eff, alloc, sol, cfg);
            if (qos_feasible_only) {
                bool ok = true;
                for (double r : rep.per_user)
                    if (r < cfg.R_qos) ok = false;
                if (!ok) continue;
            }
            if (rep.sum_rate > best_rate) {  // strict: ties keep the first
                best_rate = rep.sum_rate;
                best.theta = theta;
                best.alloc = alloc;
                best.report = rep;
                have_best = true;
            }
        }
    }
    if (!have_best)
        throw std::runtime_error("exhaustive_oracle: no feasible candidate");
    return best;
}

OracleResult exhaustive_oracle_cached(const FrequencyChannel& fc,
                                      const ScenarioConfig& cfg,
                                      const std::string& cache_dir,
                                      int realization_id) {
    std::filesystem::create_directories(cache_dir);
    char name[64];
    std::snprintf(name, sizeof(name), "oracle_%016llx_%d.bin",
                  static_cast<unsigned long long>(cfg.hash()), realization_id);
    std::string path = cache_dir + "/" + name;
    const size_t theta_n = size_t(fc.M) * cfg.Q;
    const size_t alloc_n = size_t(fc.N) * cfg.K * cfg.Q;
    if (std::filesystem::exists(path)) {
        std::ifstream in(path, std::ios::binary);
        OracleResult res;
        res.theta.resize(theta_n);
        res.alloc.resize(alloc_n);
        double sum = 0.0;
        in.read(reinterpret_cast<char*>(res.theta.data()),
                std::streamsize(theta_n * sizeof(double)));
        in.read(reinterpret_cast<char*>(res.alloc.data()),
                std::streamsize(alloc_n * sizeof(double)));
        in.read(reinterpret_cast<char*>(&sum), sizeof(double));
        if (in) {
            EffectiveChannel eff = effective_channel(fc, res.theta, cfg.Q);
            BeamformingSolution sol = solve_beamforming(eff, res.alloc, cfg);
            res.report = compute_rates(eff, res.alloc, sol, cfg);
            return res;
        }
        // fall through on a corrupt cache entry
    }
    OracleResult res = exhaustive_oracle(fc, cfg);
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        out.write(reinterpret_cast<const char*>(res.theta.data()),
                  std::streamsize(theta_n * sizeof(double)));
        out.write(reinterpret_cast<const char*>(res.alloc.data()),
                  std::streamsize(alloc_n * sizeof(double)));
        out.write(reinterpret_cast<const char*>(&res.report.sum_rate),
                  sizeof(double));
    }
    std::remove(path.c_str());
    std::rename(tmp.c_str(), path.c_str());
    return res;
}

} // namespace riso
