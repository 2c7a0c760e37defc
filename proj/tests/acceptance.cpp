// End-to-end acceptance checks. Each criterion prints a single PASS/FAIL
// line; the process exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "core/experiment.hpp"

using namespace riso;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int id, const std::string& what, bool ok, const std::string& detail) {
    std::printf("%s: criterion %d — %s (%s)\n", ok ? "PASS" : "FAIL", id,
                what.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

void run_criterion(int id, const std::string& what,
                   const std::function<std::pair<bool, std::string>()>& body) {
    try {
        auto [ok, detail] = body();
        report(id, what, ok, detail);
    } catch (const std::exception& e) {
        report(id, what, false, std::string("exception: ") + e.what());
    }
}

std::string fmt(const char* f, double a, double b) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), f, a, b);
    return buf;
}

// Reduced-iteration profile used throughout: stage boundaries scaled to one
// fifth of the defaults with narrow networks so every criterion finishes on
// a laptop CPU.
std::string desk_profile() {
    return "arch_conv1 = 8\narch_conv2 = 8\narch_conv3 = 8\narch_fc = 32\n"
           "arch_se_reduction = 4\nB = 16\n"
           "N1 = 500\nN2 = 1000\nN3 = 1400\nN4 = 1800\nN5 = 3000\n"
           "val_interval = 50\n";
}

struct TrainedModel {
    ModelParameters params;
    TrainHistory history;
};

TrainedModel train_phased(const ScenarioConfig& cfg, int train_count,
                          std::uint64_t data_seed) {
    Dataset train = generate_records(cfg, "train", train_count, data_seed);
    Dataset val = generate_records(cfg, "val", 16, data_seed ^ 0xff);
    RandomStream rng(cfg.seed);
    TrainedModel tm{ModelParameters::create(cfg, rng), {}};
    RandomStream train_rng = rng.substream(0x7121);
    tm.history = phased_train(train, val, tm.params, cfg, train_rng);
    return tm;
}

double smoothed_final_val(const TrainHistory& h) {
    std::vector<double> vals;
    for (const HistoryRecord& r : h.records)
        if (r.val_loss) vals.push_back(*r.val_loss);
    if (vals.empty()) return 0.0;
    size_t take = std::min<size_t>(3, vals.size());
    double acc = 0.0;
    for (size_t i = vals.size() - take; i < vals.size(); ++i) acc += vals[i];
    return acc / double(take);
}

// paired bootstrap lower 2.5% bound of mean(a - b)
double bootstrap_gap_lo(const std::vector<double>& a,
                        const std::vector<double>& b, std::uint64_t seed) {
    RandomStream rng(seed);
    size_t n = a.size();
    std::vector<double> means;
    for (int rep = 0; rep < 2000; ++rep) {
        double acc = 0.0;
        for (size_t i = 0; i < n; ++i) {
            size_t j = size_t(rng.next_u64() % n);
            acc += a[j] - b[j];
        }
        means.push_back(acc / double(n));
    }
    std::sort(means.begin(), means.end());
    return means[size_t(0.025 * double(means.size()))];
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

// ---------------------------------------------------------------------------

std::pair<bool, std::string> criterion1() {
    auto t0 = std::chrono::steady_clock::now();
    // hand-checkable two-carrier cases
    WaterFillResult two = water_fill({4.0, 1.0}, 1.0);
    bool ok = std::abs(two.powers[0] - 0.875) < 1e-12 &&
              std::abs(two.powers[1] - 0.125) < 1e-12 &&
              std::abs(two.water_level - 1.125) < 1e-12;
    WaterFillResult excl = water_fill({10.0, 0.1}, 0.5);
    ok = ok && std::abs(excl.powers[0] - 0.5) < 1e-12 && excl.powers[1] == 0.0;

    RandomStream rng(101);
    double worst_budget = 0.0;
    for (int trial = 0; trial < 1000 && ok; ++trial) {
        int n = 1 + int(rng.next_u64() % 16);
        double p_max = 0.1 + rng.uniform() * 10.0;
        std::vector<double> c(n);
        for (double& v : c) v = rng.uniform() < 0.1 ? 0.0 : rng.uniform() * 20.0;
        bool any = std::any_of(c.begin(), c.end(), [](double v) { return v > 0; });
        if (!any) c[0] = 1.0;
        WaterFillResult res = water_fill(c, p_max);
        double sum = std::accumulate(res.powers.begin(), res.powers.end(), 0.0);
        worst_budget = std::max(worst_budget, std::abs(sum - p_max) / p_max);
        if (std::abs(sum - p_max) > 1e-9 * p_max) ok = false;
        for (int i = 0; i < n; ++i) {
            if (res.powers[i] < 0.0) ok = false;
            if (c[i] == 0.0 && res.powers[i] != 0.0) ok = false;
            if (res.powers[i] > 0.0) {
                // active carriers share the water level
                if (std::abs(res.powers[i] + 1.0 / c[i] - res.water_level) >
                    1e-9 * (1.0 + res.water_level))
                    ok = false;
            } else if (c[i] > 0.0) {
                // inactive carriers sit above the water level
                if (1.0 / c[i] < res.water_level - 1e-9) ok = false;
            }
        }
    }
    double secs = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0).count();
    ok = ok && secs < 5.0;
    return {ok, fmt("worst budget err %.2e, %.2f s", worst_budget, secs)};
}

std::pair<bool, std::string> criterion2() {
    // sum-rate-aligned training run: the enumeration reference maximizes the
    // plain sum rate, so the QoS penalty is switched off for this comparison
    ScenarioConfig cfg = load_config(
        "M = 4\nN = 2\nK = 2\nQ = 1\nN_t = 2\nL0 = 2\nL1 = 1\nL2 = 2\n"
        "arch_conv1 = 16\narch_conv2 = 16\narch_conv3 = 16\narch_fc = 64\n"
        "arch_se_reduction = 4\nB = 32\n"
        "N1 = 1000\nN2 = 2000\nN3 = 2800\nN4 = 3600\nN5 = 6000\n"
        "val_interval = 1000\nlambda1 = 0\ntau = 0.2\n");
    TrainedModel tm = train_phased(cfg, 512, 1001);
    Dataset held = generate_records(cfg, "eval", 50, 2002);
    EvalMetrics trained = evaluate(tm.params, held, cfg);
    EvalMetrics oracle = evaluate_scheme("oracle", nullptr, held, cfg, 3);
    double ratio = trained.mean_sum_rate_mbps / oracle.mean_sum_rate_mbps;
    return {ratio >= 0.90, fmt("trained/oracle = %.4f (threshold %.2f)",
                               ratio, 0.90)};
}

std::pair<bool, std::string> criterion3() {
    ScenarioConfig cfg = load_config(
        "M = 8\nN = 4\nK = 2\nQ = 2\nN_t = 2\nL0 = 2\nL1 = 1\nL2 = 2\n" +
        desk_profile());
    TrainedModel tm = train_phased(cfg, 256, 1101);
    Dataset held = generate_records(cfg, "eval", 200, 2102);
    EvalMetrics trained = evaluate(tm.params, held, cfg);
    EvalMetrics rand_ris =
        evaluate_scheme("random_ris", &tm.params, held, cfg, 5);
    EvalMetrics no_ris =
        evaluate_scheme("without_ris", &tm.params, held, cfg, 6);
    double lo1 = bootstrap_gap_lo(trained.sum_rates_mbps,
                                  rand_ris.sum_rates_mbps, 7);
    double lo2 = bootstrap_gap_lo(rand_ris.sum_rates_mbps,
                                  no_ris.sum_rates_mbps, 8);
    bool ok = lo1 > 0.0 && lo2 > 0.0;
    return {ok, fmt("95%% gap bounds: trained-random %.4f, random-none %.4f Mbps",
                    lo1, lo2)};
}

std::pair<bool, std::string> criterion4() {
    // raised power budget so typical per-user rates straddle the QoS target
    // (otherwise the hinge penalty has no mean-rate cost to trade against),
    // and a long schedule so the no-penalty run converges close to the
    // mean-rate optimum that anchors the comparison
    std::string base =
        "M = 8\nN = 4\nK = 2\nQ = 2\nN_t = 2\nL0 = 2\nL1 = 1\nL2 = 2\n"
        "P_max = 30\n"
        "arch_conv1 = 16\narch_conv2 = 16\narch_conv3 = 16\narch_fc = 64\n"
        "arch_se_reduction = 4\nB = 32\n"
        "N1 = 1000\nN2 = 2000\nN3 = 2800\nN4 = 3600\nN5 = 6000\n"
        "val_interval = 2000\n";
    ScenarioConfig with = load_config(base + "lambda1 = 5\n");
    ScenarioConfig without = load_config(base + "lambda1 = 0\n");
    TrainedModel tm_with = train_phased(with, 256, 1201);
    TrainedModel tm_without = train_phased(without, 256, 1201);
    Dataset held = generate_records(with, "eval", 300, 2202);
    EvalMetrics m_with = evaluate(tm_with.params, held, with);
    EvalMetrics m_without = evaluate(tm_without.params, held, without);
    bool ok = m_with.rate_5pct_mbps > m_without.rate_5pct_mbps &&
              m_with.mean_sum_rate_mbps <= m_without.mean_sum_rate_mbps;
    return {ok, fmt("5pct %+.4f, mean %+.4f Mbps (penalty minus no-penalty)",
                    m_with.rate_5pct_mbps - m_without.rate_5pct_mbps,
                    m_with.mean_sum_rate_mbps - m_without.mean_sum_rate_mbps)};
}

std::pair<bool, std::string> criterion5() {
    // Known-failing: the repeated-slot baseline reuses the dynamic model's
    // own slot-0 decisions on a channel that is constant across the slots of
    // a coherence block, so the slots are exchangeable and this gap centers
    // on zero regardless of M (and goes negative when the QoS penalty makes
    // the dynamic model time-share weak users into later slots). The gap is
    // reported as measured rather than forced.
    auto gap_at = [&](int M) {
        // three users contending for four subcarriers: timeslot diversity has
        // something to buy, which is what separates dynamic from fixed
        ScenarioConfig cfg = load_config(
            "M = " + std::to_string(M) +
            "\nN = 4\nK = 3\nQ = 4\nN_t = 2\nL0 = 2\nL1 = 1\nL2 = 2\n"
            "P_max = 20\n" +
            desk_profile());
        TrainedModel tm = train_phased(cfg, 256, 1301);
        Dataset held = generate_records(cfg, "eval", 150, 2302);
        EvalMetrics dyn = evaluate(tm.params, held, cfg);
        EvalMetrics fixed =
            evaluate_scheme("fixed_allocation", &tm.params, held, cfg, 9);
        return std::make_pair(
            dyn.mean_sum_rate_mbps - fixed.mean_sum_rate_mbps,
            (dyn.mean_sum_rate_mbps - fixed.mean_sum_rate_mbps) /
                fixed.mean_sum_rate_mbps);
    };
    auto [abs4, rel4] = gap_at(4);
    auto [abs16, rel16] = gap_at(16);
    bool ok = abs4 > 0.0 && abs16 > 0.0 && rel16 > rel4;
    return {ok, fmt("relative gap M=4: %.4f, M=16: %.4f", rel4, rel16)};
}

std::pair<bool, std::string> criterion6() {
    RandomStream rng(601);
    double beta = 100.0;
    double worst = 0.0;
    bool ok = true;
    // quantizer slope against central differences, inside the active band
    for (int i = 0; i < 100; ++i) {
        double phi = M_PI + (rng.uniform() * 2.0 - 1.0) * 3.0 / beta;
        double h = 1e-6;
        double fd = (soft_quantize_scalar(phi + h, beta) -
                     soft_quantize_scalar(phi - h, beta)) / (2.0 * h);
        double an = soft_quantize_grad(phi, beta);
        double rel = std::abs(an - fd) / std::max(1e-12, std::abs(fd));
        worst = std::max(worst, rel);
        if (rel > 1e-4) ok = false;
    }
    // Gumbel-softmax backward against central differences on a random linear
    // objective
    int N = 2, K = 3, Q = 2;
    for (int trial = 0; trial < 100 && ok; ++trial) {
        std::vector<double> logits(size_t(N) * K * Q), coef(logits.size());
        for (double& v : logits) v = rng.gauss() * 2.0;
        for (double& v : coef) v = rng.gauss();
        std::vector<double> noise = sample_gumbel(logits.size(), rng);
        std::vector<double> alpha = gumbel_softmax(logits, N, K, Q, 0.5, noise);
        std::vector<double> grad =
            gumbel_softmax_backward(alpha, coef, N, K, Q, 0.5);
        for (int probe = 0; probe < 3; ++probe) {
            size_t idx = size_t(rng.next_u64() % logits.size());
            double h = 1e-5;
            auto value = [&](double delta) {
                std::vector<double> l2 = logits;
                l2[idx] += delta;
                std::vector<double> a = gumbel_softmax(l2, N, K, Q, 0.5, noise);
                double acc = 0.0;
                for (size_t i = 0; i < a.size(); ++i) acc += coef[i] * a[i];
                return acc;
            };
            double fd = (value(h) - value(-h)) / (2.0 * h);
            double rel = std::abs(grad[idx] - fd) /
                         std::max(1e-6, std::abs(fd));
            worst = std::max(worst, rel);
            if (rel > 1e-4) ok = false;
        }
    }
    // low-temperature concentration
    std::vector<double> logits = {0.1, 1.7, -0.4};
    std::vector<double> noise = sample_gumbel(3, rng);
    std::vector<double> sharp = gumbel_softmax(logits, 1, 3, 1, 0.01, noise);
    size_t arg = 0;
    for (size_t k = 1; k < 3; ++k) {
        double sk = (logits[k] + noise[k]), sa = (logits[arg] + noise[arg]);
        if (sk > sa) arg = k;
    }
    if (sharp[arg] <= 0.999) ok = false;
    // hard outputs satisfy the discrete constraints exactly
    std::vector<double> phi(32);
    for (double& v : phi) v = rng.uniform() * 2.0 * M_PI;
    for (double t : hard_quantize(phi))
        if (t != 0.0 && t != M_PI) ok = false;
    std::vector<double> raw(size_t(N) * K * Q);
    for (double& v : raw) v = rng.gauss();
    std::vector<double> onehot = hard_allocation(raw, N, K, Q);
    for (int n = 0; n < N; ++n)
        for (int q = 0; q < Q; ++q) {
            double sum = 0.0;
            for (int k = 0; k < K; ++k) {
                double v = onehot[(size_t(n) * K + k) * Q + q];
                if (v != 0.0 && v != 1.0) ok = false;
                sum += v;
            }
            if (sum != 1.0) ok = false;
        }
    WaterFillResult wf = water_fill({3.0, 1.0, 0.5}, 2.0);
    double sum = std::accumulate(wf.powers.begin(), wf.powers.end(), 0.0);
    if (std::abs(sum - 2.0) > 1e-9 * 2.0) ok = false;
    return {ok, fmt("worst relative gradient error %.2e (tol %.0e)", worst, 1e-4)};
}

std::pair<bool, std::string> criterion7() {
    bool ok = true;
    double worst = 0.0;
    // DFT round trip on sampled taps
    ScenarioConfig cfg = load_config(
        "N_t = 2\nK = 2\nM = 2\nN = 8\nQ = 2\nL0 = 2\nL1 = 2\nL2 = 3\n");
    RandomStream rng(701);
    Geometry geo = sample_geometry(cfg, rng);
    ChannelRealization ch = sample_taps(cfg, geo, rng);
    FrequencyChannel fc = to_frequency(ch, cfg);
    for (int k = 0; k < cfg.K && ok; ++k)
        for (int t = 0; t < cfg.N_t; ++t)
            for (int l = 0; l < cfg.N; ++l) {
                cd acc(0, 0);
                for (int n = 0; n < cfg.N; ++n) {
                    double ph = 2.0 * M_PI * l * n / cfg.N;
                    acc += fc.hd(n, k, t) * cd(std::cos(ph), std::sin(ph));
                }
                acc /= double(cfg.N);
                cd want = l < cfg.L0 ? ch.hd(l, k, t) : cd(0, 0);
                worst = std::max(worst, std::abs(acc - want));
                if (std::abs(acc - want) > 1e-10) ok = false;
            }
    // cascade against the brute-force convolution oracle
    for (int L1 = 1; L1 <= 3 && ok; ++L1)
        for (int L2 = 1; L2 <= 3; ++L2)
            for (int M = 1; M <= 3; ++M)
                for (int N_t = 1; N_t <= 3; ++N_t) {
                    ChannelRealization c2;
                    c2.L0 = 1;
                    c2.L1 = L1;
                    c2.L2 = L2;
                    c2.K = 2;
                    c2.M = M;
                    c2.N_t = N_t;
                    c2.h_d.assign(size_t(c2.K) * N_t, cd(0, 0));
                    c2.G.resize(size_t(L1) * M * N_t);
                    c2.r.resize(size_t(L2) * c2.K * M);
                    for (auto& v : c2.G) v = rng.cgauss(1.0);
                    for (auto& v : c2.r) v = rng.cgauss(1.0);
                    std::vector<cd> got = cascade_taps(c2);
                    int Lc = L1 + L2 - 1;
                    for (int l = 0; l < Lc; ++l)
                        for (int k = 0; k < c2.K; ++k)
                            for (int m = 0; m < M; ++m)
                                for (int t = 0; t < N_t; ++t) {
                                    cd want(0, 0);
                                    for (int i = 0; i < L2; ++i)
                                        if (l - i >= 0 && l - i < L1)
                                            want += c2.ru(i, k, m) *
                                                    c2.g(l - i, m, t);
                                    cd have = got[((size_t(l) * c2.K + k) * M +
                                                   m) * N_t + t];
                                    if (std::abs(have - want) > 1e-12) ok = false;
                                }
                }
    // Rician ratios over 10^4 realizations
    ScenarioConfig rc = load_config("K = 1\nN_t = 2\nM = 4\nL1 = 2\nL2 = 3\n"
                                    "k_BR = 2\nk_RU = 4\n");
    RandomStream rr(702);
    Geometry rgeo = sample_geometry(rc, rr);
    double los_br = 0, nlos_br = 0, los_ru = 0, nlos_ru = 0;
    for (int i = 0; i < 10000; ++i) {
        ChannelRealization s = sample_taps(rc, rgeo, rr);
        for (int m = 0; m < rc.M; ++m) {
            for (int t = 0; t < rc.N_t; ++t) {
                los_br += std::norm(s.g(0, m, t));
                for (int l = 1; l < rc.L1; ++l) nlos_br += std::norm(s.g(l, m, t));
            }
            los_ru += std::norm(s.ru(0, 0, m));
            for (int l = 1; l < rc.L2; ++l) nlos_ru += std::norm(s.ru(l, 0, m));
        }
    }
    double r_br = los_br / nlos_br / std::pow(10.0, 0.2);
    double r_ru = los_ru / nlos_ru / std::pow(10.0, 0.4);
    if (std::abs(r_br - 1.0) > 0.05 || std::abs(r_ru - 1.0) > 0.05) ok = false;
    return {ok, fmt("round-trip %.1e, Rician ratio errors %.3f",
                    worst, std::max(std::abs(r_br - 1.0), std::abs(r_ru - 1.0)))};
}

std::pair<bool, std::string> criterion8() {
    // an aggressive joint learning rate is where the curriculum pays off:
    // updating both networks at once at this rate stalls on a plateau, while
    // the single-network stages tolerate it and the final low-rate joint
    // stage refines from there
    ScenarioConfig cfg = load_config(
        "M = 8\nN = 4\nK = 2\nQ = 2\nN_t = 2\nL0 = 2\nL1 = 1\nL2 = 2\n"
        "arch_conv1 = 8\narch_conv2 = 8\narch_conv3 = 8\narch_fc = 32\n"
        "arch_se_reduction = 4\nB = 16\n"
        "N1 = 500\nN2 = 1000\nN3 = 1400\nN4 = 1800\nN5 = 5000\n"
        "val_interval = 200\nmu1 = 0.003\nmu2 = 0.003\n");
    Dataset train = generate_records(cfg, "train", 256, 1801);
    Dataset val = generate_records(cfg, "val", 16, 1802);
    auto run = [&](bool phased) {
        RandomStream rng(cfg.seed);
        ModelParameters mp = ModelParameters::create(cfg, rng);
        RandomStream train_rng = rng.substream(0x7121);
        return phased ? phased_train(train, val, mp, cfg, train_rng)
                      : joint_train(train, val, mp, cfg, train_rng);
    };
    double phased_val = smoothed_final_val(run(true));
    double joint_val = smoothed_final_val(run(false));
    bool ok = phased_val <= joint_val + 0.01 * std::abs(joint_val);
    return {ok, fmt("smoothed val loss phased %.5f vs joint %.5f",
                    phased_val, joint_val)};
}

std::pair<bool, std::string> criterion9() {
    ScenarioConfig cfg = load_config(
        "N_t = 1\nK = 2\nM = 2\nN = 2\nQ = 1\nL0 = 1\nL1 = 1\nL2 = 1\n" +
        desk_profile());
    fs::path root = fs::temp_directory_path() / "riso_acceptance_det";
    fs::remove_all(root);
    fs::create_directories(root / "ckpt");
    RandomStream rng(cfg.seed);
    ModelParameters mp = ModelParameters::create(cfg, rng);
    save_checkpoint((root / "ckpt" / "model.ckpt").string(), mp, cfg);
    std::vector<std::string> schemes = {"trained", "random_ris", "without_ris"};
    bool ok = true;
    for (int run = 0; run < 2; ++run) {
        fs::path out = root / ("out" + std::to_string(run));
        fs::create_directories(out);
        ExperimentResult res = run_experiment(cfg, "P_max", {0.0, 10.0}, schemes,
                                              (root / "ckpt").string(), 8, 17);
        write_metrics(res, out.string());
    }
    ok = slurp((root / "out0" / "metrics.csv").string()) ==
         slurp((root / "out1" / "metrics.csv").string());
    bool nonempty = !slurp((root / "out0" / "metrics.csv").string()).empty();
    fs::remove_all(root);
    return {ok && nonempty,
            ok ? "metric tables bit-identical across reruns"
               : "metric tables differ between reruns"};
}

} // namespace

int main() {
    run_criterion(1, "water-filling correctness", criterion1);
    run_criterion(2, "trained model within 90% of the exhaustive oracle",
                  criterion2);
    run_criterion(3, "scheme ordering with bootstrap confidence", criterion3);
    run_criterion(4, "QoS penalty trades mean rate for the 5th percentile",
                  criterion4);
    run_criterion(5, "dynamic-over-fixed gap widens with more elements",
                  criterion5);
    run_criterion(6, "relaxation gradient fidelity and hard constraints",
                  criterion6);
    run_criterion(7, "channel pipeline against independent oracles", criterion7);
    run_criterion(8, "phased schedule at least matches joint training",
                  criterion8);
    run_criterion(9, "bit-identical metric tables under a fixed seed",
                  criterion9);
    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
