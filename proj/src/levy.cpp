#include "hedgelab/levy.hpp"

#include <cmath>
#include <numbers>

#include "hedgelab/quadrature.hpp"

namespace hedgelab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const cd kI(0.0, 1.0);

double normal_pdf(double x, double m, double s) {
    const double z = (x - m) / s;
    return std::exp(-0.5 * z * z) / (s * std::sqrt(2.0 * std::numbers::pi));
}

}  // namespace

const char* family_name(JumpFamily f) {
    switch (f) {
        case JumpFamily::none: return "none";
        case JumpFamily::merton: return "merton";
        case JumpFamily::kou: return "kou";
        case JumpFamily::cgmy: return "cgmy";
        case JumpFamily::vg: return "vg";
        case JumpFamily::nig: return "nig";
    }
    return "?";
}

LevyModel::LevyModel(LevyTriplet triplet) : triplet_(std::move(triplet)) {
    family_ = static_cast<JumpFamily>(triplet_.jumps.index());
    if (auto* vg = std::get_if<VgJumps>(&triplet_.jumps)) {
        // C/G/M form of the VG density: C = 1/kappa, 1/M and 1/G from the
        // roots of 1 - theta*kappa*w - sigma^2*kappa*w^2/2
        const double disc = std::sqrt(vg->theta * vg->theta * vg->kappa * vg->kappa +
                                      2.0 * vg->sigma * vg->sigma * vg->kappa);
        vg->C = 1.0 / vg->kappa;
        vg->M = 2.0 / (vg->theta * vg->kappa + disc);
        vg->G = 2.0 / (disc - vg->theta * vg->kappa);
    }
    validate();
    derive_metadata();
    calibrate_envelope();
}

void LevyModel::validate() const {
    if (!(triplet_.a >= 0.0)) throw std::invalid_argument("levy: diffusion volatility a must be >= 0");
    if (!std::isfinite(triplet_.gamma)) throw std::invalid_argument("levy: drift must be finite");
    std::visit(
        [&](const auto& j) {
            using T = std::decay_t<decltype(j)>;
            if constexpr (std::is_same_v<T, MertonJumps>) {
                if (!(j.intensity >= 0.0)) throw std::invalid_argument("merton: intensity must be >= 0");
                if (!(j.stddev > 0.0)) throw std::invalid_argument("merton: jump stddev must be > 0");
            } else if constexpr (std::is_same_v<T, KouJumps>) {
                if (!(j.intensity >= 0.0)) throw std::invalid_argument("kou: intensity must be >= 0");
                if (!(j.p_up >= 0.0 && j.p_up <= 1.0)) throw std::invalid_argument("kou: p_up must lie in [0,1]");
                if (!(j.eta_up > 0.0) || !(j.eta_down > 0.0))
                    throw std::invalid_argument("kou: eta_up and eta_down must be > 0");
            } else if constexpr (std::is_same_v<T, CgmyJumps>) {
                if (!(j.C > 0.0)) throw std::invalid_argument("cgmy: C must be > 0");
                if (!(j.G > 0.0)) throw std::invalid_argument("cgmy: G must be > 0");
                if (!(j.M > 1.0)) throw std::invalid_argument("cgmy: M must be > 1 (e^x integrability)");
                if (!(j.Y >= 0.0 && j.Y < 2.0)) throw std::invalid_argument("cgmy: Y must lie in [0,2)");
                if (j.Y == 0.0) throw std::invalid_argument("cgmy: Y=0 coincides with the vg family; use vg");
                if (j.Y == 1.0) throw std::invalid_argument("cgmy: Y=1 closed form not supported");
            } else if constexpr (std::is_same_v<T, VgJumps>) {
                if (!(j.sigma > 0.0)) throw std::invalid_argument("vg: sigma must be > 0");
                if (!(j.kappa > 0.0)) throw std::invalid_argument("vg: kappa must be > 0");
                if (!(j.M > 1.0)) throw std::invalid_argument("vg: parameters imply M <= 1 (e^x not integrable)");
            } else if constexpr (std::is_same_v<T, NigJumps>) {
                if (!(j.alpha > 0.0)) throw std::invalid_argument("nig: alpha must be > 0");
                if (!(std::abs(j.beta) < j.alpha)) throw std::invalid_argument("nig: need |beta| < alpha");
                if (!(j.delta > 0.0)) throw std::invalid_argument("nig: delta must be > 0");
                if (!(j.alpha - j.beta > 1.0))
                    throw std::invalid_argument("nig: need alpha - beta > 1 (e^x integrability)");
            }
        },
        triplet_.jumps);
}

void LevyModel::derive_metadata() {
    strip_lo_ = -kInf;
    strip_hi_ = kInf;
    h1_ = true;
    h1_growth_c_ = 0.0;
    h2_ = false;
    h4_ = false;
    bg_index_ = 0.0;
    h3_inf_ = 0.0;
    h3_inf_attained_ = true;

    std::visit(
        [&](const auto& j) {
            using T = std::decay_t<decltype(j)>;
            if constexpr (std::is_same_v<T, MertonJumps> || std::is_same_v<T, KouJumps>) {
                h1_growth_c_ = 2.0 * j.intensity;  // nu_0 = whole measure
                if constexpr (std::is_same_v<T, KouJumps>) {
                    strip_lo_ = -j.eta_down;
                    strip_hi_ = j.eta_up;
                }
            } else if constexpr (std::is_same_v<T, CgmyJumps>) {
                strip_lo_ = -j.G;
                strip_hi_ = j.M;
                bg_index_ = j.Y;
                h2_ = true;
                h2_alpha_ = j.Y;
                h4_ = true;
                h4_alpha_ = j.Y;
                f_plus_ = j.C;
                f_minus_ = j.C;
                h3_inf_ = j.Y;
                h3_inf_attained_ = false;
            } else if constexpr (std::is_same_v<T, VgJumps>) {
                strip_lo_ = -j.G;
                strip_hi_ = j.M;
                bg_index_ = 0.0;
                h3_inf_ = 0.0;
                h3_inf_attained_ = false;  // alpha = 0 itself fails (infinite mass)
            } else if constexpr (std::is_same_v<T, NigJumps>) {
                strip_lo_ = -(j.alpha + j.beta);
                strip_hi_ = j.alpha - j.beta;
                bg_index_ = 1.0;
                h2_ = true;
                h2_alpha_ = 1.0;
                h4_ = true;
                h4_alpha_ = 1.0;
                f_plus_ = j.delta / std::numbers::pi;
                f_minus_ = j.delta / std::numbers::pi;
                h3_inf_ = 1.0;
                h3_inf_attained_ = false;
            }
        },
        triplet_.jumps);
}

bool LevyModel::h3_holds(double alpha) const {
    if (alpha < 0.0) return false;
    if (finite_activity()) return true;
    if (h3_inf_attained_) return alpha >= h3_inf_;
    return alpha > h3_inf_;
}

bool LevyModel::exp_moment_finite_pos(double w) const { return w < strip_hi_; }
bool LevyModel::exp_moment_finite_neg(double w) const { return w > strip_lo_; }
bool LevyModel::exp_moment_finite(double w) const {
    return exp_moment_finite_pos(w) && exp_moment_finite_neg(w);
}

cd LevyModel::jump_exponent(cd u) const {
    return std::visit(
        [&](const auto& j) -> cd {
            using T = std::decay_t<decltype(j)>;
            if constexpr (std::is_same_v<T, NoJumps>) {
                return cd(0.0);
            } else if constexpr (std::is_same_v<T, MertonJumps>) {
                return j.intensity *
                       (std::exp(kI * u * j.mean - 0.5 * j.stddev * j.stddev * u * u) - 1.0);
            } else if constexpr (std::is_same_v<T, KouJumps>) {
                const cd up = j.p_up * j.eta_up / (j.eta_up - kI * u);
                const cd dn = (1.0 - j.p_up) * j.eta_down / (j.eta_down + kI * u);
                return j.intensity * (up + dn - 1.0);
            } else if constexpr (std::is_same_v<T, CgmyJumps>) {
                // fully compensated closed form, valid for Y in (0,1) u (1,2)
                const double g = quad::gamma_negative(j.Y);
                const cd mp = std::pow(j.M - kI * u, j.Y) - std::pow(j.M, j.Y) +
                              kI * u * j.Y * std::pow(j.M, j.Y - 1.0);
                const cd gp = std::pow(j.G + kI * u, j.Y) - std::pow(j.G, j.Y) -
                              kI * u * j.Y * std::pow(j.G, j.Y - 1.0);
                return j.C * g * (mp + gp);
            } else if constexpr (std::is_same_v<T, VgJumps>) {
                return -std::log(1.0 - kI * j.theta * j.kappa * u +
                                 0.5 * j.sigma * j.sigma * j.kappa * u * u) /
                       j.kappa;
            } else {  // NigJumps
                const double g0 = std::sqrt(j.alpha * j.alpha - j.beta * j.beta);
                const cd b = j.beta + kI * u;
                return j.delta * (g0 - std::sqrt(j.alpha * j.alpha - b * b));
            }
        },
        triplet_.jumps);
}

cd LevyModel::psi(cd u) const {
    // E[e^{iuX}] finite iff -Im(u) lies in the exponential-moment strip
    const double w = u.imag();
    if (!(-w > strip_lo_ && -w < strip_hi_))
        throw std::domain_error("psi: Im(u) = " + std::to_string(w) +
                                " outside admissible strip Im(u) in (" + std::to_string(-strip_hi_) +
                                ", " + std::to_string(-strip_lo_) + ")");
    return kI * triplet_.gamma * u - 0.5 * triplet_.a * triplet_.a * u * u + jump_exponent(u);
}

cd LevyModel::char_fn(double t, cd u) const {
    if (t < 0.0) throw std::domain_error("char_fn: t must be >= 0");
    if (t == 0.0) return cd(1.0);
    return std::exp(t * psi(u));
}

double LevyModel::quadratic_variation() const {
    if (!exp_moment_finite(2.0))
        throw std::domain_error("quadratic_variation: int e^{2x} nu(dx) is not finite");
    const cd j = jump_exponent(cd(0.0, -2.0)) - 2.0 * jump_exponent(cd(0.0, -1.0));
    return triplet_.a * triplet_.a + j.real();
}

LevyModel LevyModel::martingale_adjusted() const {
    if (!exp_moment_finite(1.0))
        throw std::domain_error("martingale_adjust: e^x is not nu-integrable, no drift adjustment exists");
    LevyTriplet t = triplet_;
    // psi(-i) is linear in gamma with unit coefficient
    const double m = psi(cd(0.0, -1.0)).real();
    t.gamma -= m;
    return LevyModel(t);
}

double LevyModel::nu_density(double x) const {
    if (x == 0.0) return 0.0;
    return std::visit(
        [&](const auto& j) -> double {
            using T = std::decay_t<decltype(j)>;
            if constexpr (std::is_same_v<T, NoJumps>) {
                return 0.0;
            } else if constexpr (std::is_same_v<T, MertonJumps>) {
                return j.intensity * normal_pdf(x, j.mean, j.stddev);
            } else if constexpr (std::is_same_v<T, KouJumps>) {
                if (x > 0.0) return j.intensity * j.p_up * j.eta_up * std::exp(-j.eta_up * x);
                return j.intensity * (1.0 - j.p_up) * j.eta_down * std::exp(j.eta_down * x);
            } else if constexpr (std::is_same_v<T, CgmyJumps>) {
                const double ax = std::abs(x);
                const double e = x > 0.0 ? std::exp(-j.M * x) : std::exp(-j.G * ax);
                return j.C * e / std::pow(ax, 1.0 + j.Y);
            } else if constexpr (std::is_same_v<T, VgJumps>) {
                const double ax = std::abs(x);
                const double e = x > 0.0 ? std::exp(-j.M * x) : std::exp(-j.G * ax);
                return j.C * e / ax;
            } else {  // NigJumps
                const double ax = std::abs(x);
                const double z = j.alpha * ax;
                double k1;
                if (z > 650.0) return 0.0;  // K_1 underflows
                k1 = std::cyl_bessel_k(1.0, z);
                return j.delta * j.alpha / std::numbers::pi * std::exp(j.beta * x) * k1 / ax;
            }
        },
        triplet_.jumps);
}

double LevyModel::natural_linear_drift() const {
    return std::visit(
        [&](const auto& j) -> double {
            using T = std::decay_t<decltype(j)>;
            if constexpr (std::is_same_v<T, NoJumps>) {
                return 0.0;
            } else if constexpr (std::is_same_v<T, MertonJumps>) {
                return j.intensity * j.mean;
            } else if constexpr (std::is_same_v<T, KouJumps>) {
                return j.intensity * (j.p_up / j.eta_up - (1.0 - j.p_up) / j.eta_down);
            } else if constexpr (std::is_same_v<T, CgmyJumps>) {
                return 0.0;  // fully compensated closed form
            } else if constexpr (std::is_same_v<T, VgJumps>) {
                return j.theta;
            } else {  // NigJumps
                return j.delta * j.beta / std::sqrt(j.alpha * j.alpha - j.beta * j.beta);
            }
        },
        triplet_.jumps);
}

void LevyModel::calibrate_envelope() {
    Envelope env;
    const double a = triplet_.a;
    if (a > 0.0) {
        // Re of the jump exponent is <= 0, so the Gaussian factor is an exact bound
        env.kind = Envelope::Kind::exponential;
        env.alpha_eff = 2.0;
        env.c = 0.5 * a * a;
        env.offset = 0.0;
    } else if (h2_) {
        env.kind = Envelope::Kind::exponential;
        env.alpha_eff = h2_alpha_;
        double cmin = kInf;
        for (double lu = 0.0; lu <= 4.0; lu += 0.02) {
            const double u = std::pow(10.0, lu);
            const double r = -psi(cd(u, 0.0)).real() / std::pow(u, env.alpha_eff);
            cmin = std::min(cmin, r);
        }
        env.c = 0.95 * cmin;
        double off = 0.0;
        for (double lu = -2.0; lu <= 4.0; lu += 0.02) {
            const double u = std::pow(10.0, lu);
            off = std::max(off, psi(cd(u, 0.0)).real() + env.c * std::pow(u, env.alpha_eff));
        }
        env.offset = off;
    } else if (family_ == JumpFamily::vg) {
        const auto& j = std::get<VgJumps>(triplet_.jumps);
        env.kind = Envelope::Kind::power_law;
        env.p_rate = 2.0 * j.C;
        env.p_offset = j.C * std::log(j.G * j.M);
        env.u0 = 1.0;
    } else {
        env.kind = Envelope::Kind::none;  // finite activity, no diffusion
    }
    envelope_ = env;
}

MarketPair::MarketPair(LevyModel p_model, LevyModel q_model)
    : p_(std::move(p_model)), q_(std::move(q_model)) {
    if (p_.family() != q_.family())
        throw std::invalid_argument("market pair: P and Q must share the jump family");
    const cd m = q_.psi(cd(0.0, -1.0));
    if (std::abs(m) > 1e-10)
        throw std::invalid_argument("market pair: Q violates the martingale condition, |psi_Q(-i)| = " +
                                    std::to_string(std::abs(m)));
}

MarketPair MarketPair::drift_adjusted(const LevyModel& p_model) {
    return MarketPair(p_model, p_model.martingale_adjusted());
}

}  // namespace hedgelab
