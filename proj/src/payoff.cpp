#include "hedgelab/payoff.hpp"

#include <algorithm>
#include <cmath>

namespace hedgelab {

namespace {

const cd kI(0.0, 1.0);

// int_{|x|>1} e^{wx} nu(dx) < infinity; the tail with e^{wx} <= 1 never binds
bool moment_ok(const LevyModel& m, double w) {
    if (w > 0.0 && !m.exp_moment_finite_pos(w)) return false;
    if (w < 0.0 && !m.exp_moment_finite_neg(w)) return false;
    return true;
}

// int_{|x|>1} e^{2(Rx v x)} nu(dx): slope 2*max(R,1) on the right tail,
// 2*min(R,1) on the left tail
bool vee_moment_ok(const LevyModel& m, double R) {
    const double wp = 2.0 * std::max(R, 1.0);
    const double wn = 2.0 * std::min(R, 1.0);
    if (wp > 0.0 && !m.exp_moment_finite_pos(wp)) return false;
    if (wn < 0.0 && !m.exp_moment_finite_neg(wn)) return false;
    return true;
}

}  // namespace

double Payoff::payoff_value(double spot) const {
    if (kind == PayoffKind::call) return std::max(spot - strike, 0.0);
    return spot >= strike ? 1.0 : 0.0;
}

cd g_hat(const Payoff& payoff, cd u) {
    const cd niu = -kI * u;  // R - iu on the strip u = x + iR
    const cd kp = std::exp(kI * u * std::log(payoff.strike));
    if (payoff.kind == PayoffKind::digital) {
        if (!(u.imag() > 0.0)) throw std::domain_error("g_hat: digital payoff requires R > 0");
        return kp / niu;
    }
    if (!(u.imag() > 1.0)) throw std::domain_error("g_hat: call payoff requires R > 1");
    return kp * payoff.strike / (niu * (niu - 1.0));
}

cd g_hat(const Payoff& payoff, double u, double R) { return g_hat(payoff, cd(u, R)); }

double g_hat_bound_constant(const Payoff& payoff, double R) {
    if (payoff.kind == PayoffKind::digital) {
        // |g_hat| = K^{-R} / sqrt(R^2+u^2) <= C/(1+|u|)
        return std::pow(payoff.strike, -R) * std::sqrt(1.0 + R * R) / R;
    }
    // |g_hat| = K^{1-R} / (sqrt(R^2+u^2) sqrt((R-1)^2+u^2)) <= C/(1+u^2)
    const double c = R - 1.0;
    return std::pow(payoff.strike, 1.0 - R) * std::max(1.0, 1.0 / (c * c));
}

AssumptionReport check_assumptions(const MarketPair& pair, const Payoff& payoff,
                                   StrategyKind /*strategy*/, double R) {
    const LevyModel& P = pair.p();
    const LevyModel& Q = pair.q();
    AssumptionReport rep;
    rep.R = R;
    rep.payoff_strip_ok = payoff.r_admissible(R);
    rep.q_moment_ok = moment_ok(Q, R);
    rep.cf_integrable = Q.envelope().kind != Envelope::Kind::none;

    rep.deltaint1 = moment_ok(Q, R);
    rep.deltaint2 = vee_moment_ok(P, R);
    rep.deltaint3 = moment_ok(P, 2.0 * (R - 1.0));

    rep.quadint1 = vee_moment_ok(Q, R);
    rep.quadint2 = vee_moment_ok(P, R);
    rep.quadint3 = rep.deltaint3;

    rep.h1 = P.h1();
    rep.h2 = P.h2();
    rep.h2_alpha = P.h2_alpha();
    rep.h4 = P.h4();
    rep.h4_alpha = P.h4_alpha();
    return rep;
}

std::vector<std::string> AssumptionReport::failed(StrategyKind s) const {
    std::vector<std::string> out;
    if (!payoff_strip_ok) out.push_back("payoff damping range");
    if (!q_moment_ok) out.push_back("E_Q[e^{RX}] finite");
    if (!cf_integrable) out.push_back("characteristic function integrability");
    if (s == StrategyKind::delta) {
        if (!deltaint1) out.push_back("int e^{Rx} nu_Q");
        if (!deltaint2) out.push_back("int e^{2(Rx v x)} nu_P");
        if (!deltaint3) out.push_back("int e^{2(R-1)x} nu_P");
    } else {
        if (!quadint1) out.push_back("int e^{2(Rx v x)} nu_Q");
        if (!quadint2) out.push_back("int e^{2(Rx v x)} nu_P");
        if (!quadint3) out.push_back("int e^{2(R-1)x} nu_P");
    }
    return out;
}

double admissible_strip(const Payoff& payoff, const MarketPair& pair, StrategyKind strategy) {
    const LevyModel& P = pair.p();
    const LevyModel& Q = pair.q();
    const double cap = 40.0;  // stand-in for an unbounded moment strip

    double lo = payoff.r_min();
    double hi = cap;

    // E_Q[e^{RX}] and the first delta/quad integrability condition
    hi = std::min(hi, Q.moment_strip().second);
    // 2 max(R,1) inside both positive strips
    const double sp = std::min(P.moment_strip().second,
                               strategy == StrategyKind::quadratic ? Q.moment_strip().second
                                                                   : std::numeric_limits<double>::infinity());
    if (sp <= 2.0) {
        throw std::domain_error(std::string("admissible_strip: no damping parameter exists: payoff needs R > ") +
                                std::to_string(payoff.r_min()) + " but int e^{2(Rx v x)} nu requires 2 max(R,1) < " +
                                std::to_string(sp));
    }
    hi = std::min(hi, 0.5 * sp);
    // 2(R-1) inside the P strip
    hi = std::min(hi, 1.0 + 0.5 * P.moment_strip().second);
    lo = std::max(lo, 1.0 + 0.5 * P.moment_strip().first);
    // 2 min(R,1) above the negative strips
    lo = std::max(lo, 0.5 * std::max(P.moment_strip().first,
                                     strategy == StrategyKind::quadratic ? Q.moment_strip().first
                                                                         : -std::numeric_limits<double>::infinity()));

    if (!(lo < hi)) {
        throw std::domain_error("admissible_strip: empty intersection: payoff range (" +
                                std::to_string(payoff.r_min()) + ", inf) vs moment-feasible (" +
                                std::to_string(lo) + ", " + std::to_string(hi) + ")");
    }

    double R;
    if (payoff.kind == PayoffKind::digital) {
        R = std::min(1.0, 0.5 * (lo + hi));
    } else {
        R = std::min(2.0, 0.5 * (lo + hi));
    }
    if (!(R > lo && R < hi)) R = 0.5 * (lo + hi);
    return R;
}

}  // namespace hedgelab
