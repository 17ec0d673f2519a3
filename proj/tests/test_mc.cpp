#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "hedgelab/mc.hpp"
#include "model_zoo.hpp"
#include "oracles.hpp"

using namespace hedgelab;

namespace {

SimConfig quick_cfg(int64_t paths, uint64_t seed = 7, int m = 8) {
    SimConfig cfg;
    cfg.n_paths = paths;
    cfg.seed = seed;
    cfg.fine_factor = m;
    cfg.jump_cutoff = 0.02;  // keep unit tests light; acceptance uses tighter cutoffs
    return cfg;
}

// two-sided KS p-value against a given CDF
template <typename Cdf>
double ks_pvalue(std::vector<double> xs, Cdf cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max(d, std::abs(f - (i + 1) / n));
        d = std::max(d, std::abs(f - i / n));
    }
    const double lam = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
    double p = 0.0;
    for (int k = 1; k <= 100; ++k)
        p += 2.0 * (k % 2 ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lam * lam);
    return std::clamp(p, 0.0, 1.0);
}

struct MomentCheck {
    double mean, se;
};

// sample mean and standard error of e^{X_T} from full simulated paths
MomentCheck exp_moment(const LevyModel& model, double T, int steps, const SimConfig& cfg) {
    double s = 0.0, s2 = 0.0;
    for (int64_t p = 0; p < cfg.n_paths; ++p) {
        auto inc = simulate_increments(model, T, steps, cfg, p);
        const double x = std::accumulate(inc.begin(), inc.end(), 0.0);
        const double v = std::exp(x);
        s += v;
        s2 += v * v;
    }
    const double n = static_cast<double>(cfg.n_paths);
    const double mean = s / n;
    return {mean, std::sqrt(std::max(0.0, s2 / n - mean * mean) / n)};
}

}  // namespace

TEST_CASE("simulate: pure diffusion increments are exactly Gaussian (KS)") {
    auto m = zoo::bs(0.2, 0.03);
    SimConfig cfg = quick_cfg(1000);
    const int steps = 100;
    const double T = 1.0, dt = T / steps;
    std::vector<double> draws;
    draws.reserve(100000);
    for (uint64_t p = 0; p < 1000; ++p) {
        auto inc = simulate_increments(m, T, steps, cfg, p);
        for (double v : inc) draws.push_back(v);
    }
    const double mu = 0.03 * dt, sd = 0.2 * std::sqrt(dt);
    const double p = ks_pvalue(draws, [&](double x) { return oracle::norm_cdf((x - mu) / sd); });
    CHECK(p > 0.01);
}

TEST_CASE("simulate: e^{X_T} matches e^{T psi(-i)} for every family within 3 SE") {
    for (auto f : zoo::kAllFamilies) {
        std::mt19937_64 seeder(42);
        auto model = zoo::random_model(f, seeder);
        SimConfig cfg = quick_cfg(100000, 11 + static_cast<uint64_t>(f));
        const double T = 1.0;
        auto mc = exp_moment(model, T, 16, cfg);
        const double expect = std::exp(T * model.psi(cd(0.0, -1.0)).real());
        INFO(family_name(f));
        CHECK(std::abs(mc.mean - expect) < 3.0 * mc.se);
    }
}

TEST_CASE("simulate: martingale-adjusted models average e^{X_T} to one") {
    for (auto f : {JumpFamily::none, JumpFamily::merton, JumpFamily::cgmy, JumpFamily::vg}) {
        std::mt19937_64 seeder(43);
        auto model = zoo::random_model(f, seeder).martingale_adjusted();
        SimConfig cfg = quick_cfg(100000, 99 + static_cast<uint64_t>(f));
        auto mc = exp_moment(model, 1.0, 16, cfg);
        INFO(family_name(f));
        CHECK(std::abs(mc.mean - 1.0) < 3.0 * mc.se);
    }
}

TEST_CASE("simulate: truncated-plus-Gaussian law agrees with exact subordination draws") {
    // empirical characteristic functions from the production sampler and the
    // exact (test-side) samplers must agree within joint error bars
    struct Case {
        LevyModel model;
        std::function<double(std::mt19937_64&)> exact;
    };
    auto vg = zoo::vg(0.12, -0.14, 0.2, 0.05);
    auto nig = zoo::nig(8.0, -2.0, 0.3, 0.02);
    std::vector<Case> cases;
    cases.push_back({vg, [&](std::mt19937_64& r) { return oracle::draw_vg(r, vg, 1.0); }});
    cases.push_back({nig, [&](std::mt19937_64& r) { return oracle::draw_nig(r, nig, 1.0); }});

    for (auto& c : cases) {
        SimConfig cfg = quick_cfg(50000, 2024);
        const double u = 1.7;
        double sr = 0, si = 0, sr2 = 0, si2 = 0;
        for (int64_t p = 0; p < cfg.n_paths; ++p) {
            auto inc = simulate_increments(c.model, 1.0, 16, cfg, p);
            const double x = std::accumulate(inc.begin(), inc.end(), 0.0);
            sr += std::cos(u * x);
            si += std::sin(u * x);
            sr2 += std::cos(u * x) * std::cos(u * x);
            si2 += std::sin(u * x) * std::sin(u * x);
        }
        const double n = static_cast<double>(cfg.n_paths);
        std::mt19937_64 r2(5150);
        double tr = 0, ti = 0;
        for (int64_t k = 0; k < cfg.n_paths; ++k) {
            const double x = c.exact(r2);
            tr += std::cos(u * x);
            ti += std::sin(u * x);
        }
        const double se_r = std::sqrt((sr2 / n - sr / n * sr / n) / n) * std::sqrt(2.0);
        const double se_i = std::sqrt((si2 / n - si / n * si / n) / n) * std::sqrt(2.0);
        CHECK(std::abs(sr / n - tr / n) < 3.5 * se_r);
        CHECK(std::abs(si / n - ti / n) < 3.5 * se_i);
    }
}

TEST_CASE("simulate: deterministic for fixed seed and path index") {
    auto m = zoo::cgmy(0.5, 5.0, 10.0, 1.5);
    SimConfig cfg = quick_cfg(1000, 31337);
    auto a = simulate_increments(m, 1.0, 64, cfg, 17);
    auto b = simulate_increments(m, 1.0, 64, cfg, 17);
    CHECK(a == b);
    auto c = simulate_increments(m, 1.0, 64, cfg, 18);
    CHECK(a != c);
}

TEST_CASE("discretization_error: constant strategy gives exactly zero") {
    auto pair = MarketPair::drift_adjusted(zoo::bs());
    Payoff pay{PayoffKind::call, 1.0, 1.0};
    SimConfig cfg = quick_cfg(1000);
    const int n = 8, fine = cfg.fine_factor * n;
    std::vector<double> times(fine);
    for (int j = 0; j < fine; ++j) times[j] = j * (1.0 / fine);
    auto tbl = StrategyTable::constant(1.0, times, default_grid_spec(pair, pay));
    auto eps = discretization_error(pair, pay, tbl, n, cfg);
    for (double e : eps) CHECK(e == 0.0);
}

TEST_CASE("discretization_error: rebalancing at the fine grid gives exactly zero") {
    auto pair = MarketPair::drift_adjusted(zoo::bs());
    Payoff pay{PayoffKind::call, 1.0, 1.0};
    SimConfig cfg = quick_cfg(1000);
    const int fine = cfg.fine_factor * 4;
    auto tbl = build_experiment_table(pair, pay, StrategyKind::delta, 4, cfg);
    auto eps = discretization_error(pair, pay, tbl, fine, cfg, fine);
    for (double e : eps) CHECK(e == 0.0);
}

TEST_CASE("discretization_error: hedging error has zero mean up to drift bias") {
    auto pair = MarketPair::drift_adjusted(zoo::bs(0.2, 0.03));
    Payoff pay{PayoffKind::call, 1.0, 1.0};
    SimConfig cfg = quick_cfg(20000, 5, 16);
    const int n = 16;
    auto tbl = build_experiment_table(pair, pay, StrategyKind::delta, n, cfg);
    auto eps = discretization_error(pair, pay, tbl, n, cfg);
    double s = 0, s2 = 0;
    for (double e : eps) {
        s += e;
        s2 += e * e;
    }
    const double mean = s / eps.size();
    const double se = std::sqrt((s2 / eps.size() - mean * mean) / eps.size());
    CHECK(std::abs(mean) < 3.0 * se + 0.05 / n);
}

TEST_CASE("estimate_error: reruns and thread counts give identical results") {
    auto pair = MarketPair::drift_adjusted(zoo::merton());
    Payoff pay{PayoffKind::call, 1.0, 1.0};
    std::vector<int> ns = {4, 8, 16};
    SimConfig cfg = quick_cfg(4000, 77);
    auto tbl = build_experiment_table(pair, pay, StrategyKind::delta, 16, cfg);
    auto e1 = estimate_error(pair, pay, StrategyKind::delta, ns, cfg, &tbl);
    auto e2 = estimate_error(pair, pay, StrategyKind::delta, ns, cfg, &tbl);
    SimConfig cfg3 = cfg;
    cfg3.threads = 3;
    auto e3 = estimate_error(pair, pay, StrategyKind::delta, ns, cfg3, &tbl);
    for (size_t k = 0; k < ns.size(); ++k) {
        CHECK(e1[k].mean_sq == e2[k].mean_sq);
        CHECK(e1[k].mean_sq == e3[k].mean_sq);
        CHECK(e1[k].std_err == e3[k].std_err);
    }
}

TEST_CASE("estimate_error: BS call errors shrink with n and common paths couple estimates") {
    auto pair = MarketPair::drift_adjusted(zoo::bs(0.2, 0.01));
    Payoff pay{PayoffKind::call, 1.0, 1.0};
    std::vector<int> ns = {4, 8, 16, 32};
    SimConfig cfg = quick_cfg(20000, 13);
    auto est = estimate_error(pair, pay, StrategyKind::delta, ns, cfg);
    for (auto& e : est) CHECK(e.mean_sq > 0.0);
    for (size_t k = 1; k < est.size(); ++k)
        CHECK(est[k].mean_sq <
              est[k - 1].mean_sq + 2.0 * (est[k].std_err + est[k - 1].std_err));

    // common-random-number coupling: paired variance below the independent sum
    auto tbl = build_experiment_table(pair, pay, StrategyKind::delta, 32, cfg);
    const int fine = cfg.fine_factor * 32;
    auto ea = discretization_error(pair, pay, tbl, 8, cfg, fine);
    auto eb = discretization_error(pair, pay, tbl, 16, cfg, fine);
    double va = 0, vb = 0, vd = 0, ma = 0, mb = 0;
    for (size_t i = 0; i < ea.size(); ++i) {
        ma += ea[i];
        mb += eb[i];
    }
    ma /= ea.size();
    mb /= eb.size();
    for (size_t i = 0; i < ea.size(); ++i) {
        va += (ea[i] - ma) * (ea[i] - ma);
        vb += (eb[i] - mb) * (eb[i] - mb);
        const double d = ea[i] - eb[i] - (ma - mb);
        vd += d * d;
    }
    CHECK(vd < va + vb);
}

TEST_CASE("estimate_error: BS digital delta shows the square-root rate (small run)") {
    auto pair = MarketPair::drift_adjusted(zoo::bs(0.2, 0.01));
    Payoff pay{PayoffKind::digital, 1.0, 1.0};
    std::vector<int> ns = {4, 8, 16, 32};
    SimConfig cfg = quick_cfg(30000, 21, 16);
    auto est = estimate_error(pair, pay, StrategyKind::delta, ns, cfg);
    auto fit = rate_fit(est);
    CHECK(fit.slope > 0.3);
    CHECK(fit.slope < 0.7);
}

TEST_CASE("rate_fit: exact log-linear data is recovered exactly") {
    std::vector<ErrorEstimate> est;
    for (int n : {4, 8, 16, 32, 64}) {
        ErrorEstimate e;
        e.n = n;
        e.h = 1.0 / n;
        e.mean_sq = 2.5 * e.h;
        e.std_err = 1e-4 * e.mean_sq;
        e.n_paths = 1;
        est.push_back(e);
    }
    auto fit = rate_fit(est);
    CHECK(fit.slope == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(std::log(2.5)).epsilon(1e-10));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("rate_fit: recovers a cube-root rate from noisy synthetic data") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> noise(0.0, 0.01);
    std::vector<ErrorEstimate> est;
    for (int n : {4, 8, 16, 32, 64, 128}) {
        ErrorEstimate e;
        e.n = n;
        e.h = 1.0 / n;
        e.mean_sq = 0.7 * std::pow(e.h, 1.0 / 3.0) * (1.0 + noise(rng));
        e.std_err = 0.01 * e.mean_sq;
        e.n_paths = 1;
        est.push_back(e);
    }
    auto fit = rate_fit(est);
    CHECK(fit.slope == doctest::Approx(1.0 / 3.0).epsilon(0.06));
}

TEST_CASE("rate_fit: refuses noisy estimates with per-n diagnostics") {
    std::vector<ErrorEstimate> est;
    for (int n : {4, 8, 16, 32}) {
        ErrorEstimate e;
        e.n = n;
        e.h = 1.0 / n;
        e.mean_sq = 1e-6;
        e.std_err = 1e-6;  // hopeless signal-to-noise
        est.push_back(e);
    }
    CHECK_THROWS_WITH_AS(rate_fit(est), doctest::Contains("n=4"), std::runtime_error);
    est.pop_back();
    est.pop_back();
    CHECK_THROWS_AS(rate_fit(est), std::invalid_argument);  // fewer than 4 points
}

TEST_CASE("sim config: invariants enforced") {
    SimConfig cfg;
    cfg.fine_factor = 4;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.fine_factor = 32;
    cfg.n_paths = 10;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.n_paths = 10000;
    cfg.jump_cutoff = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("path simulator: cutoff metadata for infinite-activity families") {
    SimConfig cfg = quick_cfg(1000);
    PathSimulator sim(zoo::cgmy(0.5, 5.0, 10.0, 1.5), 1.0 / 256.0, cfg);
    CHECK(sim.big_jump_intensity() > 0.0);
    CHECK(sim.small_jump_sd() > 0.0);
    PathSimulator bs(zoo::bs(), 1.0 / 256.0, cfg);
    CHECK(bs.big_jump_intensity() == 0.0);
}
