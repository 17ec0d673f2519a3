#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace hedgelab::quad {

using cd = std::complex<double>;

struct QuadResult {
    cd value{0.0, 0.0};
    double error = 0.0;   // estimated absolute error
    int evaluations = 0;
    bool converged = false;
};

// Adaptive Gauss-Kronrod 7/15 on [a,b] for complex integrands.
// Subdivides the worst interval first; stops when the global error estimate
// drops below max(abs_tol, rel_tol * |value|).
QuadResult integrate_gk(const std::function<cd(double)>& f, double a, double b,
                        double rel_tol = 1e-9, double abs_tol = 1e-12,
                        int max_subdivisions = 2000);

QuadResult integrate_gk_real(const std::function<double(double)>& f, double a, double b,
                             double rel_tol = 1e-9, double abs_tol = 1e-12,
                             int max_subdivisions = 2000);

// A composite quadrature rule: explicit nodes and weights, typically the
// union of GK15 panels produced by adaptive refinement against probe
// integrands.  Used by the strategy-table builder, which evaluates one set
// of u-nodes against many log-price points.
struct CompositeRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Refine [a,b] until every probe integrand integrates to the requested
// tolerance, then return the union rule.  Probes share the panel structure.
CompositeRule adaptive_panel_rule(const std::vector<std::function<cd(double)>>& probes,
                                  double a, double b, double rel_tol, double abs_tol,
                                  int max_subdivisions = 4000);

// tail(p, d, U) = \int_U^\infty x^{-p} e^{-i d x} dx, with |remainder| control.
// For d = 0 requires p > 1 (closed form).  For d != 0 the integral converges
// conditionally for any p > 0: the segment up to |x d| ~ 8 is integrated
// numerically in log space, the rest by the integration-by-parts series.
cd oscillatory_power_tail(double p, double d, double U, double abs_tol);

// Gamma(-alpha) for non-integer alpha > 0, evaluated through the reflection
// formula to stay clear of the poles.
double gamma_negative(double alpha);

}  // namespace hedgelab::quad
