#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "hedgelab/levy.hpp"
#include "hedgelab/payoff.hpp"

namespace hedgelab {

struct QuadratureSpec {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    int max_subdivisions = 40000;
};

// Upsilon(u) = (psi_Q(-u-i) - psi_Q(-u) - psi_Q(-i)) / (psi_Q(-2i) - 2 psi_Q(-i))
cd upsilon(const LevyModel& q_model, cd u);

// Density of X_T from Fourier inversion of the characteristic function.
// Refuses when phi_T is not integrable (no envelope, or power-law decay with
// exponent <= 1).
double density(const LevyModel& model, double T, double x,
               const QuadratureSpec& spec = QuadratureSpec{});

// Strip-Fourier evaluator for one (pair, payoff, damping) configuration.
// Holds the assumption report and cached exponents; all evaluation methods
// are const and thread-safe.
class FourierEngine {
public:
    FourierEngine(MarketPair pair, Payoff payoff,
                  std::optional<double> r_override = std::nullopt,
                  QuadratureSpec spec = QuadratureSpec{});

    const MarketPair& pair() const { return pair_; }
    const Payoff& payoff() const { return payoff_; }
    const AssumptionReport& assumptions() const { return report_; }
    double damping() const { return R_; }
    double maturity() const { return payoff_.maturity; }
    double a_bar() const { return a_bar_; }

    // option price C(t, S) under Q
    double price(double t, double S) const;
    // delta strategy dC/dS
    double delta(double t, double S) const;
    // quadratic hedging strategy under the martingale measure
    double quadratic(double t, double S) const;
    double strategy(StrategyKind kind, double t, double S) const {
        return kind == StrategyKind::delta ? delta(t, S) : quadratic(t, S);
    }

    cd upsilon(cd u) const;

    // truncation point: envelope tail of |g_hat * phi_Q * mult| below abs_tol
    enum class Mult { none, delta, quadratic };
    double truncation(Mult mult, double tau) const;

    bool uses_subordination() const { return vg_path_; }

private:
    friend class VgEvaluator;
    double strip_value(Mult mult, double tau, double x) const;
    void require_time(double t) const;

    MarketPair pair_;
    Payoff payoff_;
    QuadratureSpec spec_;
    double R_;
    AssumptionReport report_;
    double a_bar_;
    cd psi_bar_i_;
    bool vg_path_ = false;
    std::shared_ptr<const class VgEvaluator> vg_;
};

// free-function forms mirroring the operation contracts
double price(const MarketPair& pair, const Payoff& payoff, double t, double S, double R,
             const QuadratureSpec& spec = QuadratureSpec{});
double delta_strategy(const MarketPair& pair, const Payoff& payoff, double t, double S, double R,
                      const QuadratureSpec& spec = QuadratureSpec{});
double quad_strategy(const MarketPair& pair, const Payoff& payoff, double t, double S, double R,
                     const QuadratureSpec& spec = QuadratureSpec{});

// Subordination-based evaluator for variance gamma models: price and delta as
// one-dimensional integrals over the gamma time change, and the quadratic
// strategy as the jump-covariation integral against the price function.
class VgEvaluator {
public:
    VgEvaluator(MarketPair pair, Payoff payoff);
    double price(double tau, double x) const;   // x = ln S
    double delta(double tau, double x) const;
    double quadratic(double tau, double x) const;
    double a_bar() const { return a_bar_; }

    // quadratic strategy from a tabulated price slice (table-build fast path);
    // price_at(x) must be valid on [x - z_neg, x + z_pos]
    double quadratic_from_price(double x, const std::function<double(double)>& price_at,
                                double price_here) const;
    double z_cut_pos() const { return z_pos_; }
    double z_cut_neg() const { return z_neg_; }

private:
    double gamma_expectation(const std::function<double(double)>& h, double tau, double split_g,
                             double h_limit_zero) const;

    MarketPair pair_;
    Payoff payoff_;
    VgJumps q_jumps_;
    double q_drift_;
    double a_bar_;
    double z_pos_, z_neg_;
};

}  // namespace hedgelab
