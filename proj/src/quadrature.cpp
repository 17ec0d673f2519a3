#include "hedgelab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>

namespace hedgelab::quad {

namespace {

// Gauss-Kronrod 7/15 nodes on [-1,1] (positive half; symmetric).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Interval {
    double a, b;
    cd value;
    double error;
    bool operator<(const Interval& o) const { return error < o.error; }
};

template <typename F>
Interval gk15(const F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    cd fc = f(c);
    cd res_k = kWgk[7] * fc;
    cd res_g = kWg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double x = h * kXgk[j];
        cd f1 = f(c - x);
        cd f2 = f(c + x);
        res_k += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) res_g += kWg[j / 2] * (f1 + f2);
    }
    res_k *= h;
    res_g *= h;
    double err = std::abs(res_k - res_g);
    // standard GQUADPACK-style sharpening of the raw K-G difference
    err = std::pow(200.0 * err, 1.5);
    double scale = std::abs(res_k);
    if (scale > 0.0 && err > scale) err = scale;
    if (err < std::abs(res_k - res_g)) err = std::abs(res_k - res_g);
    return {a, b, res_k, err};
}

}  // namespace

QuadResult integrate_gk(const std::function<cd(double)>& f, double a, double b,
                        double rel_tol, double abs_tol, int max_subdivisions) {
    QuadResult out;
    if (a == b) {
        out.converged = true;
        return out;
    }
    std::priority_queue<Interval> heap;
    Interval whole = gk15(f, a, b);
    out.evaluations = 15;
    cd total = whole.value;
    double total_err = whole.error;
    heap.push(whole);
    int splits = 0;
    while (splits < max_subdivisions) {
        double goal = std::max(abs_tol, rel_tol * std::abs(total));
        if (total_err <= goal) break;
        Interval worst = heap.top();
        heap.pop();
        double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {  // cannot split further
            heap.push(worst);
            break;
        }
        Interval left = gk15(f, worst.a, mid);
        Interval right = gk15(f, mid, worst.b);
        out.evaluations += 30;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++splits;
    }
    out.value = total;
    out.error = total_err;
    out.converged = total_err <= std::max(abs_tol, rel_tol * std::abs(total));
    return out;
}

QuadResult integrate_gk_real(const std::function<double(double)>& f, double a, double b,
                             double rel_tol, double abs_tol, int max_subdivisions) {
    auto wrap = [&](double x) { return cd(f(x), 0.0); };
    return integrate_gk(wrap, a, b, rel_tol, abs_tol, max_subdivisions);
}

CompositeRule adaptive_panel_rule(const std::vector<std::function<cd(double)>>& probes,
                                  double a, double b, double rel_tol, double abs_tol,
                                  int max_subdivisions) {
    if (probes.empty()) throw std::invalid_argument("adaptive_panel_rule: no probes");

    struct Panel {
        double a, b;
        double error;            // max error over probes
        std::vector<cd> values;  // per-probe panel integrals
        bool operator<(const Panel& o) const { return error < o.error; }
    };

    auto eval_panel = [&](double pa, double pb) {
        Panel p;
        p.a = pa;
        p.b = pb;
        p.error = 0.0;
        p.values.resize(probes.size());
        for (size_t i = 0; i < probes.size(); ++i) {
            Interval iv = gk15(probes[i], pa, pb);
            p.values[i] = iv.value;
            p.error = std::max(p.error, iv.error);
        }
        return p;
    };

    std::priority_queue<Panel> heap;
    std::vector<cd> totals(probes.size(), cd(0.0));
    double total_err = 0.0;
    Panel whole = eval_panel(a, b);
    for (size_t i = 0; i < probes.size(); ++i) totals[i] += whole.values[i];
    total_err = whole.error;
    heap.push(whole);
    int splits = 0;
    auto goal = [&]() {
        double scale = 0.0;
        for (auto& t : totals) scale = std::max(scale, std::abs(t));
        return std::max(abs_tol, rel_tol * scale);
    };
    while (splits < max_subdivisions && total_err > goal()) {
        Panel worst = heap.top();
        heap.pop();
        double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            heap.push(worst);
            break;
        }
        Panel left = eval_panel(worst.a, mid);
        Panel right = eval_panel(mid, worst.b);
        for (size_t i = 0; i < probes.size(); ++i)
            totals[i] += left.values[i] + right.values[i] - worst.values[i];
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++splits;
    }

    std::vector<std::pair<double, double>> panels;
    while (!heap.empty()) {
        panels.emplace_back(heap.top().a, heap.top().b);
        heap.pop();
    }
    std::sort(panels.begin(), panels.end());

    CompositeRule rule;
    rule.nodes.reserve(panels.size() * 15);
    rule.weights.reserve(panels.size() * 15);
    for (auto& [pa, pb] : panels) {
        const double c = 0.5 * (pa + pb);
        const double h = 0.5 * (pb - pa);
        for (int j = 0; j < 7; ++j) {
            rule.nodes.push_back(c - h * kXgk[j]);
            rule.weights.push_back(h * kWgk[j]);
            rule.nodes.push_back(c + h * kXgk[j]);
            rule.weights.push_back(h * kWgk[j]);
        }
        rule.nodes.push_back(c);
        rule.weights.push_back(h * kWgk[7]);
    }
    return rule;
}

cd oscillatory_power_tail(double p, double d, double U, double abs_tol) {
    if (!(p > 0.0) || !(U > 0.0)) throw std::domain_error("oscillatory_power_tail: need p>0, U>0");
    if (d == 0.0) {
        if (p <= 1.0) throw std::domain_error("oscillatory_power_tail: divergent at d=0, p<=1");
        return cd(std::pow(U, 1.0 - p) / (p - 1.0), 0.0);
    }
    const double ad = std::abs(d);
    const cd id(0.0, d);

    // by-parts series valid once x|d| is comfortably large
    auto by_parts = [&](double X) {
        cd sum(0.0);
        cd term = std::exp(cd(0.0, -d * X)) * std::pow(X, -p) / id;
        for (int k = 0; k < 14; ++k) {
            sum += term;
            if ((p + k) / (X * ad) > 0.35) break;  // series stops contracting
            term *= -(p + k) / (id * X);
            if (std::abs(term) < 0.02 * abs_tol) break;
        }
        return sum;
    };

    const double switch_point = 40.0 / ad;
    if (U >= switch_point) return by_parts(U);

    // middle segment in log space, then the series from switch_point on
    const double ya = std::log(U), yb = std::log(switch_point);
    auto g = [&](double y) {
        double x = std::exp(y);
        return std::exp(cd((1.0 - p) * y, -d * x));
    };
    QuadResult mid = integrate_gk(g, ya, yb, 1e-10, 0.1 * abs_tol, 400);
    return mid.value + by_parts(switch_point);
}

double gamma_negative(double alpha) {
    if (alpha <= 0.0) throw std::domain_error("gamma_negative: alpha must be positive");
    if (alpha == std::floor(alpha)) throw std::domain_error("gamma_negative: pole at integer alpha");
    // Gamma(-a) = -pi / (sin(pi a) * Gamma(1+a))
    return -std::numbers::pi / (std::sin(std::numbers::pi * alpha) * std::tgamma(1.0 + alpha));
}

}  // namespace hedgelab::quad
