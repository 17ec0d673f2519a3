#include "hedgelab/mc.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <numbers>
#include <cmath>
#include <sstream>
#include <thread>

#include "hedgelab/quadrature.hpp"

namespace hedgelab {

namespace {

struct Kahan {
    double s = 0.0, c = 0.0;
    void add(double x) {
        const double y = x - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
};

// integral of f over (a,b) on the log axis (both ends positive)
double log_axis_integral(const std::function<double(double)>& f, double a, double b) {
    auto g = [&](double y) {
        const double x = std::exp(y);
        return f(x) * x;
    };
    return quad::integrate_gk_real(g, std::log(a), std::log(b), 1e-11, 1e-14, 8000)
        .value.real();
}

constexpr int64_t kBlock = 4096;

}  // namespace

void SimConfig::validate() const {
    if (fine_factor < 8) throw std::invalid_argument("sim: fine_factor must be >= 8");
    if (!(jump_cutoff > 0.0)) throw std::invalid_argument("sim: jump_cutoff must be > 0");
    if (n_paths < 1000) throw std::invalid_argument("sim: need at least 1000 paths");
    if (threads < 1) throw std::invalid_argument("sim: threads must be >= 1");
}

// ---------------------------------------------------------------------------
// PathSimulator
// ---------------------------------------------------------------------------

PathSimulator::PathSimulator(const LevyModel& model, double dt, const SimConfig& cfg)
    : model_(model), dt_(dt), cutoff_(cfg.jump_cutoff) {
    if (!(dt > 0.0)) throw std::invalid_argument("simulator: dt must be positive");
    const double a = model.diffusion();
    finite_activity_ = model.finite_activity();
    if (finite_activity_) {
        drift_step_ = model.drift() * dt;
        gauss_sd_ = a * std::sqrt(dt);
        small_sd_ = 0.0;
        std::visit(
            [&](const auto& j) {
                using T = std::decay_t<decltype(j)>;
                if constexpr (std::is_same_v<T, MertonJumps> || std::is_same_v<T, KouJumps>) {
                    lambda_ = j.intensity;
                    prob_up_ = 1.0;  // the full law is sampled directly
                }
            },
            model.triplet().jumps);
        return;
    }

    const double eps = cutoff_;
    auto nu = [&](double x) { return model.nu_density(x); };
    const double lam_up = log_axis_integral(nu, eps, 60.0);
    const double lam_dn = log_axis_integral([&](double x) { return nu(-x); }, eps, 60.0);
    lambda_ = lam_up + lam_dn;
    prob_up_ = lam_up / lambda_;
    const double big_mean = log_axis_integral([&](double x) { return x * nu(x); }, eps, 60.0) -
                            log_axis_integral([&](double x) { return x * nu(-x); }, eps, 60.0);
    // small-jump variance, extending the lower end until the integrand dies
    auto x2nu = [&](double x) { return x * x * (nu(x) + nu(-x)); };
    double lo = eps;
    double var_small = 0.0;
    while (lo > 1e-200) {
        const double next = lo * 1e-3;
        const double piece = log_axis_integral(x2nu, next, lo);
        var_small += piece;
        lo = next;
        if (piece < 1e-16 * var_small) break;
    }
    drift_step_ = (model.drift() + model.natural_linear_drift() - big_mean) * dt;
    const double refine_var = cfg.gaussian_refinement ? var_small * dt : 0.0;
    gauss_sd_ = std::sqrt(a * a * dt + refine_var);
    small_sd_ = std::sqrt(var_small * dt);
}

double PathSimulator::sample_big_jump(rng::Stream& g) const {
    return std::visit(
        [&](const auto& j) -> double {
            using T = std::decay_t<decltype(j)>;
            if constexpr (std::is_same_v<T, MertonJumps>) {
                return j.mean + j.stddev * g.normal();
            } else if constexpr (std::is_same_v<T, KouJumps>) {
                if (g.uniform() < j.p_up) return g.exponential() / j.eta_up;
                return -g.exponential() / j.eta_down;
            } else if constexpr (std::is_same_v<T, CgmyJumps>) {
                const bool up = g.uniform() < prob_up_;
                const double rate = up ? j.M : j.G;
                // Pareto proposal on (eps, inf), acceptance e^{-rate (x-eps)}
                for (int it = 0; it < 100000; ++it) {
                    const double x = cutoff_ * std::pow(g.uniform_pos(), -1.0 / j.Y);
                    if (g.uniform() <= std::exp(-rate * (x - cutoff_))) return up ? x : -x;
                }
                throw std::runtime_error("cgmy jump sampler failed to accept");
            } else if constexpr (std::is_same_v<T, VgJumps>) {
                const bool up = g.uniform() < prob_up_;
                const double rate = up ? j.M : j.G;
                // piecewise envelope: 1/x on (eps, x0), exponential beyond
                const double x0 = std::max(2.0 * cutoff_, std::min(1.0, 5.0 / rate));
                const double w1 = std::exp(-rate * cutoff_) * std::log(x0 / cutoff_);
                const double w2 = std::exp(-rate * x0) / (rate * x0);
                for (int it = 0; it < 100000; ++it) {
                    double x, accept;
                    if (g.uniform() < w1 / (w1 + w2)) {
                        x = cutoff_ * std::pow(x0 / cutoff_, g.uniform());
                        accept = std::exp(-rate * (x - cutoff_));
                    } else {
                        x = x0 + g.exponential() / rate;
                        accept = x0 / x;
                    }
                    if (g.uniform() <= accept) return up ? x : -x;
                }
                throw std::runtime_error("vg jump sampler failed to accept");
            } else if constexpr (std::is_same_v<T, NigJumps>) {
                const bool up = g.uniform() < prob_up_;
                const double beta_side = up ? j.beta : -j.beta;
                const double an = j.alpha;
                // density on the chosen side: c e^{beta_side x} K1(an x)/x, x > eps
                const double x0 = std::max(2.0 * cutoff_, 1.0 / an);
                const double bp = std::max(beta_side, 0.0);
                // piece 1 envelope: e^{bp x0}/(an x^2); piece 2: K1 asymptotics
                const double c2 = std::sqrt(std::numbers::pi / (2.0 * an * x0)) * 1.3;
                const double rate2 = an - beta_side;
                const double w1 = std::exp(bp * x0) / an * (1.0 / cutoff_ - 1.0 / x0);
                const double w2 = c2 * std::exp(-rate2 * x0) / rate2 / x0;
                for (int it = 0; it < 100000; ++it) {
                    double x, envelope;
                    if (g.uniform() < w1 / (w1 + w2)) {
                        const double u = g.uniform();
                        x = 1.0 / (1.0 / cutoff_ - u * (1.0 / cutoff_ - 1.0 / x0));
                        envelope = std::exp(bp * x0) / (an * x * x);
                    } else {
                        x = x0 + g.exponential() / rate2;
                        envelope = c2 * std::exp(-rate2 * x) / x0;
                    }
                    const double z = an * x;
                    const double target =
                        z > 650.0 ? 0.0 : std::exp(beta_side * x) * std::cyl_bessel_k(1.0, z) / x;
                    if (g.uniform() * envelope <= target) return up ? x : -x;
                }
                throw std::runtime_error("nig jump sampler failed to accept");
            } else {
                return 0.0;
            }
        },
        model_.triplet().jumps);
}

void PathSimulator::sample_path(rng::Stream& g, std::span<double> increments) const {
    const double lam_dt = lambda_ * dt_;
    for (auto& dx : increments) {
        double x = drift_step_;
        if (gauss_sd_ > 0.0) x += gauss_sd_ * g.normal();
        if (lambda_ > 0.0) {
            const int64_t count = g.poisson(lam_dt);
            for (int64_t k = 0; k < count; ++k) x += sample_big_jump(g);
        }
        dx = x;
    }
}

std::vector<double> simulate_increments(const LevyModel& model, double horizon, int steps,
                                        const SimConfig& cfg, uint64_t path_index) {
    PathSimulator sim(model, horizon / steps, cfg);
    rng::Stream g(cfg.seed, path_index);
    std::vector<double> out(steps);
    sim.sample_path(g, out);
    return out;
}

// ---------------------------------------------------------------------------
// experiment driver
// ---------------------------------------------------------------------------

namespace {

struct BlockStats {
    std::vector<Kahan> sq, quart;
};

void run_experiment(const MarketPair& pair, const StrategyTable& table,
                    const std::vector<int>& n_list, const SimConfig& cfg, int fine_total,
                    std::vector<BlockStats>& blocks, std::vector<std::vector<double>>* per_path) {
    const size_t nn = n_list.size();
    std::vector<int> stride(nn);
    for (size_t k = 0; k < nn; ++k) {
        if (fine_total % n_list[k] != 0)
            throw std::invalid_argument("mc: rebalancing grid does not divide the fine grid");
        stride[k] = fine_total / n_list[k];
    }
    if (table.slice_count() != static_cast<size_t>(fine_total))
        throw std::invalid_argument("mc: strategy table does not cover the fine grid");

    const double T = table.times().back() * fine_total / (fine_total - 1.0);
    const double dt = T / fine_total;
    PathSimulator sim(pair.p(), dt, cfg);

    const int64_t n_blocks = (cfg.n_paths + kBlock - 1) / kBlock;
    blocks.assign(n_blocks, BlockStats{});
    for (auto& b : blocks) {
        b.sq.assign(nn, Kahan{});
        b.quart.assign(nn, Kahan{});
    }
    if (per_path) {
        per_path->assign(nn, std::vector<double>(cfg.n_paths));
    }

    std::atomic<int64_t> next_block{0};
    auto worker = [&]() {
        std::vector<double> inc(fine_total);
        std::vector<double> bsum(nn), fcoarse(nn);
        for (int64_t blk = next_block.fetch_add(1); blk < n_blocks;
             blk = next_block.fetch_add(1)) {
            BlockStats& stats = blocks[blk];
            const int64_t p_lo = blk * kBlock;
            const int64_t p_hi = std::min<int64_t>(cfg.n_paths, p_lo + kBlock);
            for (int64_t p = p_lo; p < p_hi; ++p) {
                rng::Stream g(cfg.seed, static_cast<uint64_t>(p));
                sim.sample_path(g, inc);
                double x = 0.0, s_prev = 1.0, afine = 0.0;
                std::fill(bsum.begin(), bsum.end(), 0.0);
                for (int j = 0; j < fine_total; ++j) {
                    const double f = table.value_slice(static_cast<size_t>(j), x);
                    for (size_t k = 0; k < nn; ++k)
                        if (j % stride[k] == 0) fcoarse[k] = f;
                    x += inc[j];
                    const double s = std::exp(x);
                    const double ds = s - s_prev;
                    afine += f * ds;
                    for (size_t k = 0; k < nn; ++k) bsum[k] += fcoarse[k] * ds;
                    s_prev = s;
                }
                for (size_t k = 0; k < nn; ++k) {
                    const double eps = afine - bsum[k];
                    stats.sq[k].add(eps * eps);
                    stats.quart[k].add(eps * eps * eps * eps);
                    if (per_path) (*per_path)[k][p] = eps;
                }
            }
        }
    };

    const int nthreads = std::max(1, cfg.threads);
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
}

std::vector<ErrorEstimate> reduce_stats(const std::vector<int>& n_list, const SimConfig& cfg,
                                        double T, const std::vector<BlockStats>& blocks) {
    std::vector<ErrorEstimate> out;
    for (size_t k = 0; k < n_list.size(); ++k) {
        Kahan sq, quart;
        for (const auto& b : blocks) {
            sq.add(b.sq[k].s);
            quart.add(b.quart[k].s);
        }
        const double npaths = static_cast<double>(cfg.n_paths);
        const double mean = sq.s / npaths;
        const double var = std::max(0.0, quart.s / npaths - mean * mean);
        ErrorEstimate e;
        e.n = n_list[k];
        e.h = T / n_list[k];
        e.mean_sq = mean;
        e.std_err = std::sqrt(var / npaths);
        e.n_paths = cfg.n_paths;
        out.push_back(e);
    }
    return out;
}

}  // namespace

StrategyTable build_experiment_table(const MarketPair& pair, const Payoff& payoff,
                                     StrategyKind strategy, int n_max, const SimConfig& cfg) {
    FourierEngine engine(pair, payoff);
    const int fine_total = cfg.fine_factor * n_max;
    const double dt = payoff.maturity / fine_total;
    std::vector<double> times(fine_total);
    for (int j = 0; j < fine_total; ++j) times[j] = j * dt;
    return StrategyTable::build(engine, strategy, times, default_grid_spec(pair, payoff),
                                cfg.threads);
}

std::vector<double> discretization_error(const MarketPair& pair, const Payoff& payoff,
                                         const StrategyTable& table, int n, const SimConfig& cfg,
                                         int fine_total) {
    cfg.validate();
    if (fine_total == 0) fine_total = cfg.fine_factor * n;
    std::vector<BlockStats> blocks;
    std::vector<std::vector<double>> paths;
    run_experiment(pair, table, {n}, cfg, fine_total, blocks, &paths);
    (void)payoff;
    return std::move(paths[0]);
}

std::vector<ErrorEstimate> estimate_error(const MarketPair& pair, const Payoff& payoff,
                                          StrategyKind strategy, const std::vector<int>& n_list,
                                          const SimConfig& cfg, const StrategyTable* prebuilt) {
    cfg.validate();
    if (n_list.empty()) throw std::invalid_argument("mc: empty n list");
    if (!std::is_sorted(n_list.begin(), n_list.end()))
        throw std::invalid_argument("mc: n list must be ascending");
    const int n_max = n_list.back();
    const int fine_total = cfg.fine_factor * n_max;
    StrategyTable local = prebuilt ? StrategyTable(*prebuilt)
                                   : build_experiment_table(pair, payoff, strategy, n_max, cfg);
    std::vector<BlockStats> blocks;
    run_experiment(pair, local, n_list, cfg, fine_total, blocks, nullptr);
    return reduce_stats(n_list, cfg, payoff.maturity, blocks);
}

RateFit rate_fit(const std::vector<ErrorEstimate>& estimates) {
    if (estimates.size() < 4)
        throw std::invalid_argument("rate_fit: need at least 4 estimates");
    std::ostringstream weak;
    for (const auto& e : estimates) {
        if (!(e.mean_sq > 3.0 * e.std_err))
            weak << " n=" << e.n << " (mean_sq=" << e.mean_sq << ", std_err=" << e.std_err << ")";
    }
    if (!weak.str().empty())
        throw std::runtime_error("rate_fit: insufficient signal-to-noise at" + weak.str());

    const size_t m = estimates.size();
    std::vector<double> x(m), y(m), w(m);
    for (size_t i = 0; i < m; ++i) {
        x[i] = std::log(estimates[i].h);
        y[i] = std::log(estimates[i].mean_sq);
        const double rel = estimates[i].std_err / estimates[i].mean_sq;
        w[i] = 1.0 / std::max(rel * rel, 1e-12);
    }
    double sw = 0, swx = 0, swy = 0;
    for (size_t i = 0; i < m; ++i) {
        sw += w[i];
        swx += w[i] * x[i];
        swy += w[i] * y[i];
    }
    const double xbar = swx / sw, ybar = swy / sw;
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < m; ++i) {
        sxx += w[i] * (x[i] - xbar) * (x[i] - xbar);
        sxy += w[i] * (x[i] - xbar) * (y[i] - ybar);
    }
    RateFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = ybar - fit.slope * xbar;
    const double se = std::sqrt(1.0 / sxx);
    fit.slope_ci_lo = fit.slope - 1.96 * se;
    fit.slope_ci_hi = fit.slope + 1.96 * se;
    double ss_res = 0, ss_tot = 0;
    for (size_t i = 0; i < m; ++i) {
        const double fitted = fit.intercept + fit.slope * x[i];
        ss_res += w[i] * (y[i] - fitted) * (y[i] - fitted);
        ss_tot += w[i] * (y[i] - ybar) * (y[i] - ybar);
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

}  // namespace hedgelab
