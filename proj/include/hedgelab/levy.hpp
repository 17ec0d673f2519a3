#pragma once

#include <complex>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

namespace hedgelab {

using cd = std::complex<double>;

// ---------------------------------------------------------------------------
// Jump structure descriptors.  Each family carries its natural closed-form
// characteristic exponent; the model drift `gamma` is an additional linear
// term on top of that form.
// ---------------------------------------------------------------------------

struct NoJumps {
    bool operator==(const NoJumps&) const = default;
};

struct MertonJumps {  // compound Poisson, Gaussian jump sizes
    double intensity;
    double mean;
    double stddev;
    bool operator==(const MertonJumps&) const = default;
};

struct KouJumps {  // compound Poisson, double-exponential jump sizes
    double intensity;
    double p_up;
    double eta_up;
    double eta_down;
    bool operator==(const KouJumps&) const = default;
};

struct CgmyJumps {  // density C e^{-Mx}/x^{1+Y} (x>0), C e^{-G|x|}/|x|^{1+Y} (x<0)
    double C;
    double G;
    double M;
    double Y;
    bool operator==(const CgmyJumps&) const = default;
};

struct VgJumps {  // variance gamma, (sigma, theta, kappa) parametrization
    double sigma;
    double theta;
    double kappa;
    // derived C/G/M form of the Levy density, filled at model construction
    double C = 0.0, G = 0.0, M = 0.0;
    bool operator==(const VgJumps&) const = default;
};

struct NigJumps {  // normal inverse Gaussian
    double alpha;
    double beta;
    double delta;
    bool operator==(const NigJumps&) const = default;
};

using JumpSpec = std::variant<NoJumps, MertonJumps, KouJumps, CgmyJumps, VgJumps, NigJumps>;

enum class JumpFamily { none, merton, kou, cgmy, vg, nig };

struct LevyTriplet {
    double a = 0.0;      // diffusion volatility, per sqrt(year)
    double gamma = 0.0;  // linear drift, per year
    JumpSpec jumps = NoJumps{};
    bool operator==(const LevyTriplet&) const = default;
};

// Decay envelope for |phi_t(z)| on the real line (Lemma-style bounds used to
// truncate Fourier integrals).
struct Envelope {
    enum class Kind { exponential, power_law, none };
    Kind kind = Kind::none;
    // exponential: Re psi(z) <= offset - c |z|^alpha_eff for all real z
    double alpha_eff = 0.0;
    double c = 0.0;
    double offset = 0.0;
    // power_law:  Re psi(z) <= p_offset - p_rate * ln|z| for |z| >= u0
    double p_rate = 0.0;
    double p_offset = 0.0;
    double u0 = 1.0;
};

// ---------------------------------------------------------------------------
// LevyModel: immutable; all derived metadata is computed at construction.
// ---------------------------------------------------------------------------
class LevyModel {
public:
    explicit LevyModel(LevyTriplet triplet);

    const LevyTriplet& triplet() const { return triplet_; }
    JumpFamily family() const { return family_; }
    double diffusion() const { return triplet_.a; }
    double drift() const { return triplet_.gamma; }

    // characteristic exponent, E[e^{iuX_t}] = e^{t psi(u)}
    cd psi(cd u) const;
    cd char_fn(double t, cd u) const;
    // jump part of psi (family closed form, J(0)=0)
    cd jump_exponent(cd u) const;

    // open interval (w_lo, w_hi) with int_{|x|>1} e^{wx} nu(dx) < infinity
    std::pair<double, double> moment_strip() const { return {strip_lo_, strip_hi_}; }
    bool exp_moment_finite(double w) const;
    bool exp_moment_finite_pos(double w) const;  // positive-x tail only
    bool exp_moment_finite_neg(double w) const;  // negative-x tail only

    // A = a^2 + int (e^z - 1)^2 nu(dz); requires the e^{2x} moment
    double quadratic_variation() const;

    // drift-only measure change making e^X a martingale
    LevyModel martingale_adjusted() const;

    // structural hypotheses on the Levy measure
    bool h1() const { return h1_; }
    double h1_growth_c() const { return h1_growth_c_; }  // 2 nu_0(R)
    bool h2() const { return h2_; }
    double h2_alpha() const { return h2_alpha_; }
    bool h4() const { return h4_; }
    double h4_alpha() const { return h4_alpha_; }
    double f_plus() const { return f_plus_; }
    double f_minus() const { return f_minus_; }
    bool h3_holds(double alpha) const;
    double bg_index() const { return bg_index_; }

    const Envelope& envelope() const { return envelope_; }

    // Levy density nu(x) (x != 0); zero for NoJumps
    double nu_density(double x) const;
    // b such that psi(u) = i(gamma+b)u - a^2u^2/2 + int(e^{iux}-1-iux)nu(dx)
    double natural_linear_drift() const;

    bool has_jumps() const { return family_ != JumpFamily::none; }
    bool finite_activity() const {
        return family_ == JumpFamily::none || family_ == JumpFamily::merton ||
               family_ == JumpFamily::kou;
    }

private:
    void validate() const;
    void derive_metadata();
    void calibrate_envelope();

    LevyTriplet triplet_;
    JumpFamily family_ = JumpFamily::none;
    double strip_lo_ = -std::numeric_limits<double>::infinity();
    double strip_hi_ = std::numeric_limits<double>::infinity();
    bool h1_ = true;
    double h1_growth_c_ = 0.0;
    bool h2_ = false;
    double h2_alpha_ = 0.0;
    bool h4_ = false;
    double h4_alpha_ = 0.0;
    double f_plus_ = 0.0;
    double f_minus_ = 0.0;
    double h3_inf_ = 0.0;      // h3 holds for every alpha > h3_inf_
    bool h3_inf_attained_ = true;
    double bg_index_ = 0.0;
    Envelope envelope_;
};

// Historical/risk-neutral model pair.  Construction enforces the martingale
// condition on Q and that both models belong to the same jump family.
class MarketPair {
public:
    MarketPair(LevyModel p_model, LevyModel q_model);
    // convenience: Q from P by drift adjustment
    static MarketPair drift_adjusted(const LevyModel& p_model);

    const LevyModel& p() const { return p_; }
    const LevyModel& q() const { return q_; }

private:
    LevyModel p_;
    LevyModel q_;
};

const char* family_name(JumpFamily f);

}  // namespace hedgelab
