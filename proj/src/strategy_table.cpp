#include "hedgelab/strategy_table.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <numbers>
#include <thread>

#include "hedgelab/quadrature.hpp"

namespace hedgelab {

namespace {
const cd kI(0.0, 1.0);
constexpr double kPi = std::numbers::pi;

// Catmull-Rom on a uniform grid, clamped stencil at the edges
double cubic_interp(const std::vector<double>& f, double lo, double dx, double x) {
    const int n = static_cast<int>(f.size());
    double s = (x - lo) / dx;
    if (s <= 0.0) return f.front();
    if (s >= n - 1.0) return f.back();
    const int i = static_cast<int>(s);
    const double w = s - i;
    const double f0 = f[std::max(i - 1, 0)];
    const double f1 = f[i];
    const double f2 = f[std::min(i + 1, n - 1)];
    const double f3 = f[std::min(i + 2, n - 1)];
    return f1 + 0.5 * w *
                    (f2 - f0 +
                     w * (2.0 * f0 - 5.0 * f1 + 4.0 * f2 - f3 +
                          w * (3.0 * (f1 - f2) + f3 - f0)));
}

// one-sided sup-tail bound from the exponential martingale e^{wX_t - t psi(-iw)}
double tail_quantile(const LevyModel& m, double T, double w, double eps) {
    const double drift_part = std::max(0.0, m.psi(cd(0.0, -w)).real()) * T;
    return (drift_part + std::log(1.0 / eps)) / std::abs(w);
}

double density_scale(const LevyModel& q, double tau) {
    const Envelope& env = q.envelope();
    if (env.kind == Envelope::Kind::exponential)
        return std::pow(std::max(env.c, 1e-8) * tau, 1.0 / env.alpha_eff);
    // variance scale is the honest fallback for power-law decay
    const double var = q.quadratic_variation();
    return std::sqrt(var * tau);
}

}  // namespace

TableGridSpec default_grid_spec(const MarketPair& pair, const Payoff& payoff, double prob_eps) {
    const LevyModel& p = pair.p();
    const double T = payoff.maturity;
    const auto [wlo, whi] = p.moment_strip();
    const double wp = std::min(0.8 * whi, 20.0);
    const double wn = std::max(0.8 * wlo, -20.0);
    TableGridSpec g;
    g.x_hi = tail_quantile(p, T, wp, 0.5 * prob_eps);
    g.x_lo = -tail_quantile(p, T, wn, 0.5 * prob_eps);
    const double lk = std::log(payoff.strike);
    g.x_hi = std::max(g.x_hi, lk + 0.3) + 0.05;
    g.x_lo = std::min(g.x_lo, lk - 0.3) - 0.05;
    g.nx = 768;
    g.refine_strike = payoff.kind == PayoffKind::digital;
    g.refine_factor = 8;
    return g;
}

double StrategyTable::value_slice(size_t k, double x) const {
    const Slice& s = slices_[k];
    if (!s.band.empty()) {
        const double blo = s.band_lo;
        const double bhi = s.band_lo + s.band_dx * (s.band.size() - 1);
        // stay one stencil cell inside the band edges
        if (x >= blo + s.band_dx && x <= bhi - s.band_dx)
            return cubic_interp(s.band, s.band_lo, s.band_dx, x);
    }
    return cubic_interp(s.coarse, grid_.x_lo, dx_, x);
}

double StrategyTable::value(double t, double x) const {
    const auto& ts = times_;
    if (t <= ts.front()) return value_slice(0, x);
    if (t >= ts.back()) return value_slice(ts.size() - 1, x);
    const auto it = std::upper_bound(ts.begin(), ts.end(), t);
    const size_t hi = static_cast<size_t>(it - ts.begin());
    const size_t lo = hi - 1;
    if (t - ts[lo] < 1e-12 * (1.0 + std::abs(t))) return value_slice(lo, x);
    const double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
    return (1.0 - w) * value_slice(lo, x) + w * value_slice(hi, x);
}

StrategyTable StrategyTable::constant(double value, std::vector<double> times,
                                      TableGridSpec grid) {
    StrategyTable tbl;
    tbl.times_ = std::move(times);
    tbl.grid_ = grid;
    tbl.dx_ = (grid.x_hi - grid.x_lo) / (grid.nx - 1);
    tbl.slices_.resize(tbl.times_.size());
    for (auto& s : tbl.slices_) s.coarse.assign(grid.nx, value);
    return tbl;
}

StrategyTable StrategyTable::build(const FourierEngine& engine, StrategyKind kind,
                                   std::vector<double> times, TableGridSpec grid, int threads) {
    if (times.empty()) throw std::invalid_argument("strategy table: empty time grid");
    if (!std::is_sorted(times.begin(), times.end()))
        throw std::invalid_argument("strategy table: time grid must be sorted");
    const double T = engine.maturity();
    if (times.back() >= T)
        throw std::domain_error("strategy table: slices must lie strictly before maturity");

    StrategyTable tbl;
    tbl.times_ = times;
    tbl.grid_ = grid;
    tbl.dx_ = (grid.x_hi - grid.x_lo) / (grid.nx - 1);
    tbl.slices_.resize(times.size());

    const Payoff& payoff = engine.payoff();
    const double lk = std::log(payoff.strike);
    const double R = engine.damping();
    const LevyModel& q = engine.pair().q();
    const bool vg = engine.uses_subordination();
    const auto mult =
        kind == StrategyKind::delta ? FourierEngine::Mult::delta : FourierEngine::Mult::quadratic;

    // x-nodes of one slice: uniform coarse grid plus the optional strike band
    auto band_params = [&](double tau, double& blo, double& bdx, int& bn) {
        const double scale = density_scale(q, tau);
        const double half = std::clamp(6.0 * scale, 10.0 * tbl.dx_ / grid.refine_factor,
                                       0.25 * (grid.x_hi - grid.x_lo));
        bdx = tbl.dx_ / grid.refine_factor;
        blo = lk - half;
        bn = static_cast<int>(std::ceil(2.0 * half / bdx)) + 1;
    };

    VgEvaluator const* vg_eval = nullptr;
    std::shared_ptr<VgEvaluator> vg_holder;
    if (vg) {
        vg_holder = std::make_shared<VgEvaluator>(engine.pair(), payoff);
        vg_eval = vg_holder.get();
    }

    auto build_slice = [&](size_t si) {
        const double tau = T - times[si];
        Slice& out = tbl.slices_[si];
        out.coarse.resize(grid.nx);
        int bn = 0;
        if (grid.refine_strike) {
            band_params(tau, out.band_lo, out.band_dx, bn);
            out.band.resize(bn);
        }

        if (vg) {
            // subordination path: delta directly, quadratic through a price
            // slice extended by the jump-kernel support
            if (kind == StrategyKind::delta) {
                for (int j = 0; j < grid.nx; ++j)
                    out.coarse[j] = vg_eval->delta(tau, grid.x_lo + j * tbl.dx_);
                for (int j = 0; j < bn; ++j)
                    out.band[j] = vg_eval->delta(tau, out.band_lo + j * out.band_dx);
                return;
            }
            const double ext_lo = grid.x_lo - vg_eval->z_cut_neg() - 0.1;
            const double ext_hi = grid.x_hi + vg_eval->z_cut_pos() + 0.1;
            const int pn = static_cast<int>(std::ceil((ext_hi - ext_lo) / tbl.dx_)) + 1;
            std::vector<double> pr(pn);
            for (int j = 0; j < pn; ++j) pr[j] = vg_eval->price(tau, ext_lo + j * tbl.dx_);
            std::vector<double> prb;
            double pblo = 0.0, pbdx = 0.0;
            int pbn = 0;
            if (grid.refine_strike) {
                band_params(tau, pblo, pbdx, pbn);
                prb.resize(pbn);
                for (int j = 0; j < pbn; ++j) prb[j] = vg_eval->price(tau, pblo + j * pbdx);
            }
            auto price_at = [&](double x) {
                if (x <= ext_lo || x >= ext_hi) {
                    if (payoff.kind == PayoffKind::digital) return x >= lk ? 1.0 : 0.0;
                    return std::max(std::exp(x) - payoff.strike, 0.0);
                }
                if (pbn > 0 && x >= pblo + pbdx && x <= pblo + pbdx * (pbn - 2))
                    return cubic_interp(prb, pblo, pbdx, x);
                return cubic_interp(pr, ext_lo, tbl.dx_, x);
            };
            auto fq = [&](double x) {
                return vg_eval->quadratic_from_price(x, price_at, price_at(x));
            };
            for (int j = 0; j < grid.nx; ++j) out.coarse[j] = fq(grid.x_lo + j * tbl.dx_);
            for (int j = 0; j < bn; ++j) out.band[j] = fq(out.band_lo + j * out.band_dx);
            return;
        }

        // generic path: one composite u-rule per slice, shared across x
        const double U = engine.truncation(mult, tau);
        auto integrand_at = [&](double x) {
            return [&, x](double xi) -> cd {
                const cd u(xi, R);
                cd v = g_hat(payoff, u) * q.char_fn(tau, -u) * std::exp(cd(0.0, -xi * x));
                v *= (kind == StrategyKind::delta) ? -kI * u : engine.upsilon(u);
                return v;
            };
        };
        std::vector<std::function<cd(double)>> probes = {
            integrand_at(grid.x_lo), integrand_at(lk + 0.37 * tbl.dx_), integrand_at(grid.x_hi)};
        auto rule = quad::adaptive_panel_rule(probes, 0.0, U, 1e-9, 1e-11, 20000);

        const size_t K = rule.nodes.size();
        std::vector<cd> W(K);
        for (size_t k = 0; k < K; ++k) {
            const cd u(rule.nodes[k], R);
            cd w = rule.weights[k] * g_hat(payoff, u) * q.char_fn(tau, -u);
            w *= (kind == StrategyKind::delta) ? -kI * u : engine.upsilon(u);
            W[k] = w;
        }
        auto eval_grid = [&](double lo, double dxg, int n, std::vector<double>& dst) {
            std::vector<cd> acc(n, cd(0.0));
            for (size_t k = 0; k < K; ++k) {
                const cd rot = std::exp(cd(0.0, -rule.nodes[k] * dxg));
                cd z = std::exp(cd(0.0, -rule.nodes[k] * lo)) * W[k];
                for (int j = 0; j < n; ++j) {
                    acc[j] += z;
                    z *= rot;
                }
            }
            for (int j = 0; j < n; ++j) {
                const double x = lo + j * dxg;
                dst[j] = std::exp((R - 1.0) * x) * acc[j].real() / kPi;
            }
        };
        eval_grid(grid.x_lo, tbl.dx_, grid.nx, out.coarse);
        if (bn > 0) eval_grid(out.band_lo, out.band_dx, bn, out.band);
    };

    const int nthreads = std::max(1, threads);
    if (nthreads == 1) {
        for (size_t si = 0; si < times.size(); ++si) build_slice(si);
    } else {
        std::vector<std::thread> pool;
        std::atomic<size_t> next{0};
        for (int t = 0; t < nthreads; ++t)
            pool.emplace_back([&]() {
                for (size_t si = next.fetch_add(1); si < tbl.times_.size();
                     si = next.fetch_add(1))
                    build_slice(si);
            });
        for (auto& th : pool) th.join();
    }
    return tbl;
}

}  // namespace hedgelab
