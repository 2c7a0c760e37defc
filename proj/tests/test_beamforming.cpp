#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/beamforming.hpp"

using namespace riso;

namespace {

// effective channel filled from an explicit list, [Q][N][K][N_t]
EffectiveChannel make_eff(int Q, int N, int K, int N_t,
                          const std::vector<cd>& h) {
    EffectiveChannel eff;
    eff.Q = Q;
    eff.N = N;
    eff.K = K;
    eff.N_t = N_t;
    eff.h = h;
    return eff;
}

std::vector<double> one_hot(int N, int K, int Q, const std::vector<int>& users) {
    std::vector<double> a(size_t(N) * K * Q, 0.0);
    for (int n = 0; n < N; ++n)
        for (int q = 0; q < Q; ++q)
            a[(size_t(n) * K + users[size_t(n) * Q + q]) * Q + q] = 1.0;
    return a;
}

} // namespace

TEST_CASE("MRT along an axis channel") {
    bool deg = false;
    std::vector<cd> w = mrt_direction({cd(1, 0), cd(0, 0), cd(0, 0), cd(0, 0)}, &deg);
    CHECK_FALSE(deg);
    CHECK(std::abs(w[0] - cd(1, 0)) < 1e-12);
    for (int t = 1; t < 4; ++t) CHECK(std::abs(w[t]) < 1e-12);
}

TEST_CASE("MRT hand value for a complex channel") {
    std::vector<cd> h = {cd(1, 1), cd(0, 0)};
    std::vector<cd> w = mrt_direction(h);
    CHECK(std::abs(w[0] - cd(1, -1) / std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(w[1]) < 1e-12);
    cd dot = h[0] * w[0] + h[1] * w[1];
    CHECK(std::abs(dot) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("MRT attains the channel norm on random inputs") {
    RandomStream rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<cd> h(4);
        for (auto& v : h) v = rng.cgauss(1.0);
        std::vector<cd> w = mrt_direction(h);
        cd dot(0, 0);
        double nrm2 = 0.0, wn = 0.0;
        for (int t = 0; t < 4; ++t) {
            dot += h[t] * w[t];
            nrm2 += std::norm(h[t]);
            wn += std::norm(w[t]);
        }
        CHECK(std::norm(dot) == doctest::Approx(nrm2).epsilon(1e-12));
        CHECK(wn == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("MRT flags the zero channel") {
    bool deg = false;
    std::vector<cd> w = mrt_direction({cd(0, 0), cd(0, 0)}, &deg);
    CHECK(deg);
    CHECK(std::abs(w[0]) == 0.0);
    CHECK(std::abs(w[1]) == 0.0);
}

TEST_CASE("water-filling splits equal gains evenly") {
    WaterFillResult r = water_fill({3.0, 3.0}, 2.0);
    CHECK(r.powers[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.powers[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("two-carrier closed form") {
    WaterFillResult r = water_fill({4.0, 1.0}, 1.0);
    CHECK(r.powers[0] == doctest::Approx(0.875).epsilon(1e-12));
    CHECK(r.powers[1] == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(r.water_level == doctest::Approx(1.125).epsilon(1e-12));
}

TEST_CASE("active-set exclusion of a weak carrier") {
    WaterFillResult r = water_fill({10.0, 0.1}, 0.5);
    CHECK(r.powers[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.powers[1] == 0.0);
    // inactive carrier must sit above the water level
    CHECK(1.0 / 0.1 >= r.water_level);
}

TEST_CASE("zero-gain entries are excluded, all-zero is an error") {
    WaterFillResult r = water_fill({0.0, 2.0}, 1.0);
    CHECK(r.powers[0] == 0.0);
    CHECK(r.powers[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(water_fill({0.0, 0.0}, 1.0), NoSignalError);
}

TEST_CASE("KKT conditions on random gain vectors") {
    RandomStream rng(7);
    for (int trial = 0; trial < 500; ++trial) {
        int n = 1 + int(rng.next_u64() % 16);
        std::vector<double> c(n);
        for (double& v : c)
            v = rng.uniform() < 0.15 ? 0.0 : std::pow(10.0, 3.0 * rng.uniform() - 1.0);
        bool any = false;
        for (double v : c) any = any || v > 0.0;
        if (!any) c[0] = 1.0;
        double pmax = 0.1 + 10.0 * rng.uniform();
        WaterFillResult r = water_fill(c, pmax);
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            CHECK(r.powers[i] >= 0.0);
            sum += r.powers[i];
            if (c[i] == 0.0) {
                CHECK(r.powers[i] == 0.0);
            } else if (r.powers[i] > 0.0) {
                CHECK(r.powers[i] + 1.0 / c[i] ==
                      doctest::Approx(r.water_level).epsilon(1e-9));
            } else {
                CHECK(1.0 / c[i] >= r.water_level - 1e-9 * r.water_level);
            }
        }
        CHECK(sum == doctest::Approx(pmax).epsilon(1e-9));
    }
}

TEST_CASE("water-filling sum rate is nondecreasing in the budget") {
    std::vector<double> c = {5.0, 2.0, 0.7, 0.1};
    double prev = -1.0;
    for (double p = 0.25; p <= 8.0; p *= 2.0) {
        WaterFillResult r = water_fill(c, p);
        double rate = 0.0;
        for (size_t i = 0; i < c.size(); ++i)
            rate += std::log2(1.0 + c[i] * r.powers[i]);
        CHECK(rate >= prev);
        prev = rate;
    }
}

TEST_CASE("single resource block closed form") {
    ScenarioConfig cfg = load_config("N_t = 2\nK = 1\nM = 1\nN = 1\nQ = 1\n"
                                     "L0 = 1\nL1 = 1\nL2 = 1\n");
    std::vector<cd> h = {cd(2e-4, 1e-4), cd(-1e-4, 3e-4)};
    EffectiveChannel eff = make_eff(1, 1, 1, 2, h);
    std::vector<double> alloc = {1.0};
    BeamformingSolution sol = solve_beamforming(eff, alloc, cfg);
    CHECK(sol.power(0, 0) == doctest::Approx(cfg.p_max_mw).epsilon(1e-12));
    RateReport rep = compute_rates(eff, alloc, sol, cfg);
    double nrm2 = std::norm(h[0]) + std::norm(h[1]);
    double want = cfg.W * std::log2(1.0 + nrm2 * cfg.p_max_mw / cfg.sigma2_mw);
    CHECK(rep.per_user[0] == doctest::Approx(want).epsilon(1e-9));
    CHECK(rep.sum_rate == doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("identical channels get uniform power") {
    ScenarioConfig cfg = load_config("N_t = 1\nK = 1\nM = 1\nN = 4\nQ = 1\n"
                                     "L0 = 1\nL1 = 1\nL2 = 1\n");
    std::vector<cd> h(4, cd(1e-4, 0));
    EffectiveChannel eff = make_eff(1, 4, 1, 1, h);
    std::vector<double> alloc(4, 1.0);
    BeamformingSolution sol = solve_beamforming(eff, alloc, cfg);
    for (int n = 0; n < 4; ++n)
        CHECK(sol.power(0, n) == doctest::Approx(cfg.p_max_mw / 4.0).epsilon(1e-9));
}

TEST_CASE("per-timeslot budget is tight") {
    ScenarioConfig cfg = load_config("N_t = 2\nK = 2\nM = 1\nN = 3\nQ = 2\n"
                                     "L0 = 1\nL1 = 1\nL2 = 1\n");
    RandomStream rng(21);
    std::vector<cd> h(size_t(2) * 3 * 2 * 2);
    for (auto& v : h) v = rng.cgauss(1e-8);
    EffectiveChannel eff = make_eff(2, 3, 2, 2, h);
    std::vector<double> alloc = one_hot(3, 2, 2, {0, 1, 1, 0, 0, 1});
    BeamformingSolution sol = solve_beamforming(eff, alloc, cfg);
    for (int q = 0; q < 2; ++q) {
        double sum = 0.0;
        for (int n = 0; n < 3; ++n) {
            sum += sol.power(q, n);
            CHECK(sol.power(q, n) >= 0.0);
            if (sol.power(q, n) > 0.0) {
                double wn = 0.0;
                for (int t = 0; t < 2; ++t) wn += std::norm(sol.dir(q, n, t));
                CHECK(wn == doctest::Approx(1.0).epsilon(1e-12));
            }
        }
        CHECK(sum == doctest::Approx(cfg.p_max_mw).epsilon(1e-9));
    }
}

TEST_CASE("beamforming matches a grid-search power oracle on a tiny instance") {
    ScenarioConfig cfg = load_config("N_t = 2\nK = 2\nM = 2\nN = 2\nQ = 1\n"
                                     "L0 = 1\nL1 = 1\nL2 = 1\n");
    RandomStream rng(31);
    std::vector<cd> h(size_t(1) * 2 * 2 * 2);
    for (auto& v : h) v = rng.cgauss(1e-8);
    EffectiveChannel eff = make_eff(1, 2, 2, 2, h);
    std::vector<double> alloc = one_hot(2, 2, 1, {0, 1});
    BeamformingSolution sol = solve_beamforming(eff, alloc, cfg);
    RateReport rep = compute_rates(eff, alloc, sol, cfg);

    // exhaustive split of P_max over the two RBs in 1e-3 steps, MRT directions
    double c0 = 0.0, c1 = 0.0;
    for (int t = 0; t < 2; ++t) {
        c0 += std::norm(eff.at(0, 0, 0, t));
        c1 += std::norm(eff.at(0, 1, 1, t));
    }
    c0 /= cfg.sigma2_mw;
    c1 /= cfg.sigma2_mw;
    double best = 0.0;
    const int steps = 1000;
    for (int i = 0; i <= steps; ++i) {
        double p0 = cfg.p_max_mw * i / steps;
        double p1 = cfg.p_max_mw - p0;
        double rate = std::log2(1.0 + c0 * p0) + std::log2(1.0 + c1 * p1);
        best = std::max(best, rate);
    }
    best *= cfg.W / cfg.Q;
    CHECK(rep.sum_rate >= best * (1.0 - 1e-5));
    CHECK(rep.sum_rate <= best * (1.0 + 1e-3));
}

TEST_CASE("MRT beats random unit directions") {
    ScenarioConfig cfg = load_config("N_t = 4\nK = 1\nM = 1\nN = 1\nQ = 1\n"
                                     "L0 = 1\nL1 = 1\nL2 = 1\n");
    RandomStream rng(41);
    std::vector<cd> h(4);
    for (auto& v : h) v = rng.cgauss(1e-8);
    EffectiveChannel eff = make_eff(1, 1, 1, 4, h);
    BeamformingSolution sol = solve_beamforming(eff, {1.0}, cfg);
    cd dot(0, 0);
    for (int t = 0; t < 4; ++t) dot += h[t] * sol.dir(0, 0, t);
    double gamma_mrt = std::norm(dot);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<cd> w(4);
        double nrm = 0.0;
        for (auto& v : w) {
            v = rng.cgauss(1.0);
            nrm += std::norm(v);
        }
        nrm = std::sqrt(nrm);
        cd d(0, 0);
        for (int t = 0; t < 4; ++t) d += h[t] * w[t] / nrm;
        CHECK(std::norm(d) <= gamma_mrt * (1.0 + 1e-12));
    }
}

TEST_CASE("rates vanish without power and respect SNR invariance") {
    ScenarioConfig cfg = load_config("N_t = 1\nK = 1\nM = 1\nN = 2\nQ = 1\n"
                                     "L0 = 1\nL1 = 1\nL2 = 1\n");
    std::vector<cd> h = {cd(1e-4, 0), cd(2e-4, 0)};
    EffectiveChannel eff = make_eff(1, 2, 1, 1, h);
    std::vector<double> alloc = {1.0, 1.0};
    BeamformingSolution sol = solve_beamforming(eff, alloc, cfg);
    RateReport base = compute_rates(eff, alloc, sol, cfg);

    BeamformingSolution silent = sol;
    std::fill(silent.powers.begin(), silent.powers.end(), 0.0);
    RateReport zero = compute_rates(eff, alloc, silent, cfg);
    CHECK(zero.sum_rate == 0.0);
    for (double r : zero.per_user) CHECK(r == 0.0);

    // scaling noise and power together leaves rates unchanged
    ScenarioConfig scaled = cfg;
    scaled.sigma2_mw *= 4.0;
    scaled.p_max_mw *= 4.0;
    BeamformingSolution sol4 = solve_beamforming(eff, alloc, scaled);
    RateReport rep4 = compute_rates(eff, alloc, sol4, scaled);
    CHECK(rep4.sum_rate == doctest::Approx(base.sum_rate).epsilon(1e-9));
}

TEST_CASE("one-hot rates count only assigned triples") {
    ScenarioConfig cfg = load_config("N_t = 2\nK = 2\nM = 1\nN = 2\nQ = 2\n"
                                     "L0 = 1\nL1 = 1\nL2 = 1\n");
    RandomStream rng(55);
    std::vector<cd> h(size_t(2) * 2 * 2 * 2);
    for (auto& v : h) v = rng.cgauss(1e-8);
    EffectiveChannel eff = make_eff(2, 2, 2, 2, h);
    std::vector<double> alloc = one_hot(2, 2, 2, {0, 0, 1, 1});
    BeamformingSolution sol = solve_beamforming(eff, alloc, cfg);
    RateReport rep = compute_rates(eff, alloc, sol, cfg);
    double wq = cfg.W / cfg.Q;
    std::vector<double> manual(2, 0.0);
    for (int n = 0; n < 2; ++n)
        for (int q = 0; q < 2; ++q) {
            int k = sol.served(q, n);
            REQUIRE(k >= 0);
            cd dot(0, 0);
            for (int t = 0; t < 2; ++t) dot += eff.at(q, n, k, t) * sol.dir(q, n, t);
            double gamma = sol.power(q, n) * std::norm(dot) / cfg.sigma2_mw;
            manual[k] += wq * std::log2(1.0 + gamma);
        }
    for (int k = 0; k < 2; ++k)
        CHECK(rep.per_user[k] == doctest::Approx(manual[k]).epsilon(1e-9));
    CHECK(rep.sum_rate == doctest::Approx(manual[0] + manual[1]).epsilon(1e-9));
}

TEST_CASE("unassigned subcarriers carry no power") {
    ScenarioConfig cfg = load_config("N_t = 1\nK = 1\nM = 1\nN = 2\nQ = 1\n"
                                     "L0 = 1\nL1 = 1\nL2 = 1\n");
    std::vector<cd> h = {cd(1e-4, 0), cd(1e-4, 0)};
    EffectiveChannel eff = make_eff(1, 2, 1, 1, h);
    std::vector<double> alloc = {1.0, 0.0};  // subcarrier 1 unassigned
    BeamformingSolution sol = solve_beamforming(eff, alloc, cfg);
    CHECK(sol.served(0, 1) == -1);
    CHECK(sol.power(0, 1) == 0.0);
    CHECK(sol.power(0, 0) == doctest::Approx(cfg.p_max_mw).epsilon(1e-9));
}
