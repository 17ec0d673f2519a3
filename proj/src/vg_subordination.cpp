#include <algorithm>
#include <cmath>
#include <numbers>

#include "hedgelab/fourier.hpp"
#include "hedgelab/quadrature.hpp"

namespace hedgelab {

namespace {
constexpr double kPi = std::numbers::pi;
double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
double norm_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }
}  // namespace

VgEvaluator::VgEvaluator(MarketPair pair, Payoff payoff)
    : pair_(std::move(pair)), payoff_(payoff) {
    if (pair_.q().family() != JumpFamily::vg)
        throw std::logic_error("VgEvaluator: Q model is not variance gamma");
    if (pair_.q().diffusion() != 0.0)
        throw std::logic_error("VgEvaluator: only needed for pure-jump VG");
    q_jumps_ = std::get<VgJumps>(pair_.q().triplet().jumps);
    q_drift_ = pair_.q().drift();
    a_bar_ = pair_.q().quadratic_variation();
    z_pos_ = 45.0 / (q_jumps_.M - 1.0);
    z_neg_ = 45.0 / q_jumps_.G;
}

// E[h(G_tau)] with G ~ Gamma(tau/kappa, kappa), via the substitution
// v = (g/kappa)^{rho} which flattens the g^{rho-1} factor:
//   E[h(G)] = (1/Gamma(1+rho)) int_0^vmax h(kappa v^{1/rho}) e^{-v^{1/rho}} dv
double VgEvaluator::gamma_expectation(const std::function<double(double)>& h, double tau,
                                      double split_g, double h_limit_zero) const {
    const double rho = tau / q_jumps_.kappa;
    const double vmax = std::pow(45.0, rho);
    auto g_of_v = [&](double v) {
        if (v <= 0.0) return 0.0;
        return q_jumps_.kappa * std::exp(std::log(v) / rho);
    };
    auto f = [&](double v) {
        const double g = g_of_v(v);
        // below the underflow floor of the substitution the integrand sits at
        // its g->0 limit
        if (g <= 1e-300 || !std::isfinite(g)) return quad::cd(h_limit_zero, 0.0);
        return quad::cd(h(g) * std::exp(-g / q_jumps_.kappa), 0.0);
    };
    std::vector<double> knots{0.0};
    if (split_g > 0.0) {
        for (double m : {0.25, 1.0, 4.0}) {
            const double v = std::pow(split_g * m / q_jumps_.kappa, rho);
            if (v > 1e-300 && v < vmax) knots.push_back(v);
        }
    }
    knots.push_back(vmax);
    std::sort(knots.begin(), knots.end());
    quad::cd total(0.0);
    for (size_t i = 0; i + 1 < knots.size(); ++i) {
        if (knots[i + 1] <= knots[i]) continue;
        auto r = quad::integrate_gk(f, knots[i], knots[i + 1], 1e-10, 1e-13, 4000);
        total += r.value;
        if (!r.converged && r.error > 1e-6 * (1.0 + std::abs(total)))
            throw std::runtime_error(
                "vg: gamma-subordination integral did not converge (value unbounded at the "
                "singular point?)");
    }
    return total.real() / std::tgamma(1.0 + rho);
}

double VgEvaluator::price(double tau, double x) const {
    const double d0 = x - std::log(payoff_.strike) + q_drift_ * tau;
    const double sig = q_jumps_.sigma, th = q_jumps_.theta;
    const double split = th != 0.0 && d0 / th < 0.0 ? -d0 / th : (d0 / sig) * (d0 / sig);
    if (payoff_.kind == PayoffKind::digital) {
        auto h = [&](double g) {
            const double d2 = (d0 + th * g) / (sig * std::sqrt(g));
            return norm_cdf(d2);
        };
        const double lim = d0 > 0.0 ? 1.0 : (d0 < 0.0 ? 0.0 : 0.5);
        return gamma_expectation(h, tau, split, lim);
    }
    const double S = std::exp(x), K = payoff_.strike;
    auto h = [&](double g) {
        const double sq = sig * std::sqrt(g);
        const double d2 = (d0 + th * g) / sq;
        const double d1 = d2 + sq;
        return S * std::exp(q_drift_ * tau + th * g + 0.5 * sig * sig * g) * norm_cdf(d1) -
               K * norm_cdf(d2);
    };
    const double step = d0 > 0.0 ? 1.0 : (d0 < 0.0 ? 0.0 : 0.5);
    const double lim = (S * std::exp(q_drift_ * tau) - K) * step;
    return gamma_expectation(h, tau, split, lim);
}

double VgEvaluator::delta(double tau, double x) const {
    const double d0 = x - std::log(payoff_.strike) + q_drift_ * tau;
    const double sig = q_jumps_.sigma, th = q_jumps_.theta;
    const double split = th != 0.0 && d0 / th < 0.0 ? -d0 / th : (d0 / sig) * (d0 / sig);
    if (payoff_.kind == PayoffKind::digital) {
        auto h = [&](double g) {
            const double sq = sig * std::sqrt(g);
            const double d2 = (d0 + th * g) / sq;
            return norm_pdf(d2) / sq;
        };
        return gamma_expectation(h, tau, split, 0.0) / std::exp(x);
    }
    auto h = [&](double g) {
        const double sq = sig * std::sqrt(g);
        const double d1 = (d0 + th * g) / sq + sq;
        return std::exp(q_drift_ * tau + th * g + 0.5 * sig * sig * g) * norm_cdf(d1);
    };
    const double lim = std::exp(q_drift_ * tau) * (d0 > 0.0 ? 1.0 : (d0 < 0.0 ? 0.0 : 0.5));
    return gamma_expectation(h, tau, split, lim);
}

double VgEvaluator::quadratic_from_price(double x, const std::function<double(double)>& price_at,
                                         double price_here) const {
    const LevyModel& q = pair_.q();
    auto integrand = [&](double z) {
        return quad::cd((price_at(x + z) - price_here) * std::expm1(z) * q.nu_density(z), 0.0);
    };
    quad::cd total(0.0);
    const double knots[] = {-z_neg_, -std::min(0.5, 0.5 * z_neg_), 0.0,
                            std::min(0.5, 0.5 * z_pos_), z_pos_};
    for (int i = 0; i < 4; ++i) {
        if (knots[i + 1] <= knots[i]) continue;
        total += quad::integrate_gk(integrand, knots[i], knots[i + 1], 1e-8, 1e-12, 4000).value;
    }
    return total.real() / (std::exp(x) * a_bar_);
}

double VgEvaluator::quadratic(double tau, double x) const {
    const double here = price(tau, x);
    return quadratic_from_price(
        x, [&](double xx) { return price(tau, xx); }, here);
}

}  // namespace hedgelab
