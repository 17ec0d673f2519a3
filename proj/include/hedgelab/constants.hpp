#pragma once

#include <optional>
#include <string>

#include "hedgelab/fourier.hpp"

namespace hedgelab {

// asymptotic coefficients of stable-like small jumps:
//   psi(u)/|u|^alpha -> -c_{+/-} as u -> +/- infinity
//   Upsilon(u+iR)/|u|^{alpha-1} -> gamma_{+/-} / A_bar
struct StableCoeffs {
    double alpha = 0.0;
    cd c_plus, c_minus;
    cd gamma_plus, gamma_minus;
};

enum class TheoremTag {
    t3_regular,
    t4_jump,
    t4_diffusion,
    t5_regular,
    t6_jump,
    t6_diffusion,
    uncovered,
};

const char* theorem_name(TheoremTag tag);

struct RatePrediction {
    TheoremTag theorem = TheoremTag::uncovered;
    double rate_exponent = 0.0;  // beta, with r(h) = h^beta
    double constant = std::numeric_limits<double>::quiet_NaN();
    AssumptionReport diagnostics;
    std::string note;
    bool covered() const { return theorem != TheoremTag::uncovered; }
};

// universal constants of the digital-payoff theorems (cached after first use)
double constant_D();
double constant_D_alpha(double alpha);  // alpha in (1,2)
double constant_Q_alpha(double alpha);  // alpha in (3/2,2)

// the shared integrand profile (1 - e^-w - w e^-w) / (w (1 - e^-w)), stable
// near w = 0 where it tends to 1/2
double digital_error_profile(double w);

StableCoeffs stable_coeffs(const LevyModel& model);

// limiting value of E[eps_T^2]/h in the regular regime (Theorems 3/5),
// evaluated by the two-dimensional strip integral
double regular_limit_2d(const MarketPair& pair, const Payoff& payoff, StrategyKind strategy,
                        std::optional<double> r_override = std::nullopt,
                        double rel_tol = 1e-6);

// constant of the named irregular-regime theorem given the value of the
// historical density at the log-strike (exposed for scaling diagnostics)
double theorem_constant(const MarketPair& pair, TheoremTag tag, double p_density_at_logk);

RatePrediction predict(const MarketPair& pair, const Payoff& payoff, StrategyKind strategy,
                       std::optional<double> r_override = std::nullopt,
                       bool with_constant = true);

}  // namespace hedgelab
