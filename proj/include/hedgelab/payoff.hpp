#pragma once

#include <string>
#include <vector>

#include "hedgelab/levy.hpp"

namespace hedgelab {

enum class PayoffKind { call, digital };
enum class StrategyKind { delta, quadratic };

// European payoff with its generalized Fourier transform on a damping strip.
// call:    g(x) = (e^x - K)^+,  g_hat(u+iR) = K^{iu+1-R} / ((R-iu)(R-1-iu)),  R > 1
// digital: g(x) = 1_{x >= ln K}, g_hat(u+iR) = K^{iu-R} / (R-iu),             R > 0
struct Payoff {
    PayoffKind kind = PayoffKind::call;
    double strike = 1.0;
    double maturity = 1.0;

    bool operator==(const Payoff&) const = default;
    bool lipschitz() const { return kind == PayoffKind::call; }
    // admissible damping exponents (lower bound, open)
    double r_min() const { return kind == PayoffKind::call ? 1.0 : 0.0; }
    bool r_admissible(double r) const { return r > r_min(); }
    double payoff_value(double spot) const;
};

// g_hat evaluated at u + iR for real u
cd g_hat(const Payoff& payoff, double u, double R);
// same, at a complex point on the strip (u.imag() == R)
cd g_hat(const Payoff& payoff, cd u);

// explicit constant in |g_hat(u+iR)| <= C/(1+|u|) (digital) or C/(1+|u|^2) (call)
double g_hat_bound_constant(const Payoff& payoff, double R);

// Flags reported by the assumption checker.  `required_ok` is what the
// predictors and the pricing engine gate on.
struct AssumptionReport {
    double R = 0.0;
    bool payoff_strip_ok = false;   // R in the payoff's admissible range
    bool q_moment_ok = false;       // E^Q[e^{R X_t}] < infinity
    bool cf_integrable = false;     // int |phi_Q(u-iR)|/(1+|u|) du < inf for all t < T
    bool deltaint1 = false, deltaint2 = false, deltaint3 = false;
    bool quadint1 = false, quadint2 = false, quadint3 = false;
    bool h1 = false, h2 = false, h4 = false;
    double h2_alpha = 0.0, h4_alpha = 0.0;

    bool pricing_ok() const { return payoff_strip_ok && q_moment_ok && cf_integrable; }
    bool strategy_ok(StrategyKind s) const {
        if (s == StrategyKind::delta) return pricing_ok() && deltaint1 && deltaint2 && deltaint3;
        return pricing_ok() && quadint1 && quadint2 && quadint3;
    }
    std::vector<std::string> failed(StrategyKind s) const;
};

AssumptionReport check_assumptions(const MarketPair& pair, const Payoff& payoff,
                                   StrategyKind strategy, double R);

// Deterministic damping-parameter choice strictly inside the intersection of
// the payoff range and the moment strips.  Throws when the intersection is
// empty, listing both intervals.
double admissible_strip(const Payoff& payoff, const MarketPair& pair, StrategyKind strategy);

}  // namespace hedgelab
