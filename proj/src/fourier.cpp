#include "hedgelab/fourier.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "hedgelab/quadrature.hpp"

namespace hedgelab {

namespace {
const cd kI(0.0, 1.0);
constexpr double kPi = std::numbers::pi;

std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + v[i];
    return out;
}
}  // namespace

cd upsilon(const LevyModel& q_model, cd u) {
    const cd denom = q_model.psi(cd(0.0, -2.0)) - 2.0 * q_model.psi(cd(0.0, -1.0));
    const cd num =
        q_model.psi(-u - kI) - q_model.psi(-u) - q_model.psi(cd(0.0, -1.0));
    return num / denom;
}

double density(const LevyModel& model, double T, double x, const QuadratureSpec& spec) {
    if (!(T > 0.0)) throw std::domain_error("density: T must be positive");
    const Envelope& env = model.envelope();
    double U = 0.0;
    if (env.kind == Envelope::Kind::exponential) {
        U = 8.0;
        while (true) {
            const double tail = std::exp(T * (env.offset - env.c * std::pow(U, env.alpha_eff))) /
                                (T * env.c * env.alpha_eff * std::pow(U, env.alpha_eff - 1.0));
            if (tail < 0.5 * spec.abs_tol || U > 1e9) break;
            U *= 2.0;
        }
    } else if (env.kind == Envelope::Kind::power_law) {
        const double p = env.p_rate * T;
        if (p < 1.2)
            throw std::domain_error(
                "density: characteristic function decays like |u|^-" + std::to_string(p) +
                " at this horizon; not integrable enough for Fourier inversion");
        U = env.u0 * 2.0;
        while (true) {
            const double tail = std::exp(T * env.p_offset) * std::pow(U, 1.0 - p) / (p - 1.0);
            if (tail < 0.5 * spec.abs_tol || U > 1e9) break;
            U *= 2.0;
        }
    } else {
        throw std::domain_error(
            "density: characteristic function does not decay (finite-activity jumps with no "
            "diffusion); X_T has no integrable density");
    }
    auto f = [&](double v) { return model.char_fn(T, cd(v, 0.0)) * std::exp(cd(0.0, -v * x)); };
    auto r = quad::integrate_gk(f, 0.0, U, spec.rel_tol, 0.25 * spec.abs_tol,
                                spec.max_subdivisions);
    double val = r.value.real() / kPi;
    if (val < -std::max(1e-10, 10.0 * spec.abs_tol))
        throw std::runtime_error("density: negative value beyond tolerance at x=" +
                                 std::to_string(x));
    return std::max(val, 0.0);
}

// ---------------------------------------------------------------------------
// FourierEngine
// ---------------------------------------------------------------------------

FourierEngine::FourierEngine(MarketPair pair, Payoff payoff, std::optional<double> r_override,
                             QuadratureSpec spec)
    : pair_(std::move(pair)), payoff_(payoff), spec_(spec) {
    if (r_override) {
        R_ = *r_override;
        if (!payoff_.r_admissible(R_))
            throw std::domain_error("fourier: damping R=" + std::to_string(R_) +
                                    " outside the payoff's admissible range");
    } else {
        // prefer a strip valid for both strategies, fall back to delta-only
        try {
            R_ = admissible_strip(payoff_, pair_, StrategyKind::quadratic);
        } catch (const std::domain_error&) {
            R_ = admissible_strip(payoff_, pair_, StrategyKind::delta);
        }
    }
    report_ = check_assumptions(pair_, payoff_, StrategyKind::quadratic, R_);
    psi_bar_i_ = pair_.q().psi(cd(0.0, -1.0));
    a_bar_ = pair_.q().exp_moment_finite(2.0) ? pair_.q().quadratic_variation()
                                              : std::numeric_limits<double>::quiet_NaN();
    vg_path_ = pair_.q().family() == JumpFamily::vg &&
               pair_.q().envelope().kind == Envelope::Kind::power_law;
    if (vg_path_) vg_ = std::make_shared<VgEvaluator>(pair_, payoff_);
}

cd FourierEngine::upsilon(cd u) const {
    const cd num = pair_.q().psi(-u - kI) - pair_.q().psi(-u) - psi_bar_i_;
    return num / a_bar_;
}

void FourierEngine::require_time(double t) const {
    if (!(t >= 0.0) || !(t < payoff_.maturity))
        throw std::domain_error("fourier: need 0 <= t < T (strategies blow up at expiry)");
}

double FourierEngine::truncation(Mult mult, double tau) const {
    const Envelope& env = pair_.q().envelope();
    const double kg = payoff_.kind == PayoffKind::call ? 2.0 : 1.0;
    const double Cg = g_hat_bound_constant(payoff_, R_);
    double gm = 0.0;  // multiplier growth exponent
    double Cm = 1.0;
    if (mult == Mult::delta) {
        gm = 1.0;
        Cm = 2.0 + R_;
    } else if (mult == Mult::quadratic) {
        gm = 1.0;
        double worst = 0.0;
        for (double v : {1.0, 30.0, 1000.0})
            worst = std::max(worst, std::abs(upsilon(cd(v, R_))) / (1.0 + v));
        Cm = 2.0 * (worst + 0.1);
    }

    if (env.kind == Envelope::Kind::none)
        throw std::domain_error(
            "fourier: characteristic function does not decay (finite-activity jumps with no "
            "diffusion); strip integrals are not convergent");

    double U = 8.0;
    while (U < 1e9) {
        double bound = std::numeric_limits<double>::infinity();
        if (env.kind == Envelope::Kind::exponential) {
            bound = Cg * Cm * std::pow(1.0 + U, gm - kg) *
                    std::exp(tau * (env.offset - env.c * std::pow(U, env.alpha_eff))) /
                    (tau * env.c * env.alpha_eff * std::pow(U, env.alpha_eff - 1.0));
        } else {  // power law
            const double p = kg - gm + env.p_rate * tau - 1.0;
            if (p <= 0.1)
                throw std::domain_error(
                    "fourier: integrand decays too slowly for direct truncation at this time "
                    "to expiry (variance gamma digitals use the subordination path)");
            bound = Cg * Cm * std::exp(tau * env.p_offset) * std::pow(U, -p) / p;
        }
        if (bound < 0.25 * spec_.abs_tol) break;
        U *= 2.0;
    }
    return U;
}

double FourierEngine::strip_value(Mult mult, double tau, double x) const {
    const double U = truncation(mult, tau);
    const LevyModel& q = pair_.q();
    auto integrand = [&](double xi) -> cd {
        const cd u(xi, R_);
        cd v = g_hat(payoff_, u) * q.char_fn(tau, -u) * std::exp(cd(0.0, -xi * x));
        if (mult == Mult::delta)
            v *= -kI * u;
        else if (mult == Mult::quadratic)
            v *= upsilon(u);
        return v;
    };
    const double pref = std::exp((mult == Mult::none ? R_ : R_ - 1.0) * x);
    auto r = quad::integrate_gk(integrand, 0.0, U, spec_.rel_tol,
                                0.25 * spec_.abs_tol * kPi / std::max(pref, 1e-8),
                                spec_.max_subdivisions);
    if (!r.converged && r.error > 100.0 * std::max(spec_.abs_tol, spec_.rel_tol * std::abs(r.value)))
        throw std::runtime_error("fourier: quadrature failed to converge (tau=" +
                                 std::to_string(tau) + ")");
    return pref * r.value.real() / kPi;
}

double FourierEngine::price(double t, double S) const {
    require_time(t);
    if (!(S > 0.0)) throw std::domain_error("fourier: S must be positive");
    if (!report_.pricing_ok())
        throw std::domain_error("fourier: pricing assumptions fail: " +
                                join(report_.failed(StrategyKind::delta)));
    const double tau = payoff_.maturity - t;
    if (vg_path_) return vg_->price(tau, std::log(S));
    return strip_value(Mult::none, tau, std::log(S));
}

double FourierEngine::delta(double t, double S) const {
    require_time(t);
    if (!(S > 0.0)) throw std::domain_error("fourier: S must be positive");
    if (!report_.pricing_ok())
        throw std::domain_error("fourier: pricing assumptions fail: " +
                                join(report_.failed(StrategyKind::delta)));
    const double tau = payoff_.maturity - t;
    if (vg_path_) return vg_->delta(tau, std::log(S));
    return strip_value(Mult::delta, tau, std::log(S));
}

double FourierEngine::quadratic(double t, double S) const {
    require_time(t);
    if (!(S > 0.0)) throw std::domain_error("fourier: S must be positive");
    if (!std::isfinite(a_bar_))
        throw std::domain_error("fourier: quadratic strategy needs the e^{2x} moment of nu_Q");
    if (!report_.pricing_ok() || !report_.quadint1)
        throw std::domain_error("fourier: quadratic-strategy assumptions fail: " +
                                join(report_.failed(StrategyKind::quadratic)));
    const double tau = payoff_.maturity - t;
    if (vg_path_) return vg_->quadratic(tau, std::log(S));
    return strip_value(Mult::quadratic, tau, std::log(S));
}

double price(const MarketPair& pair, const Payoff& payoff, double t, double S, double R,
             const QuadratureSpec& spec) {
    return FourierEngine(pair, payoff, R, spec).price(t, S);
}
double delta_strategy(const MarketPair& pair, const Payoff& payoff, double t, double S, double R,
                      const QuadratureSpec& spec) {
    return FourierEngine(pair, payoff, R, spec).delta(t, S);
}
double quad_strategy(const MarketPair& pair, const Payoff& payoff, double t, double S, double R,
                     const QuadratureSpec& spec) {
    return FourierEngine(pair, payoff, R, spec).quadratic(t, S);
}

}  // namespace hedgelab
