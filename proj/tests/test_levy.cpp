#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hedgelab/levy.hpp"
#include "model_zoo.hpp"
#include "oracles.hpp"

using namespace hedgelab;

TEST_CASE("psi: vanishes at zero for every family") {
    std::mt19937_64 rng(7101);
    for (auto f : zoo::kAllFamilies) {
        for (int rep = 0; rep < 5; ++rep) {
            auto m = zoo::random_model(f, rng);
            CHECK(std::abs(m.psi(cd(0.0, 0.0))) < 1e-12);
        }
    }
}

TEST_CASE("psi: Black-Scholes closed form") {
    auto m = zoo::bs(0.2, 0.01);
    const cd v = m.psi(cd(1.0, 0.0));
    CHECK(v.real() == doctest::Approx(-0.02).epsilon(1e-14));
    CHECK(v.imag() == doctest::Approx(0.01).epsilon(1e-14));
}

TEST_CASE("psi: Hermitian symmetry and nonpositive real part") {
    std::mt19937_64 rng(7102);
    for (auto f : zoo::kAllFamilies) {
        auto m = zoo::random_model(f, rng);
        for (double u : {0.1, 0.7, 3.0, 17.0, 251.0}) {
            const cd a = m.psi(cd(u, 0.0));
            const cd b = m.psi(cd(-u, 0.0));
            CHECK(std::abs(b - std::conj(a)) < 1e-12 * (1.0 + std::abs(a)));
            CHECK(a.real() <= 1e-12);
        }
    }
}

TEST_CASE("psi: closed forms match brute-force Levy-Khintchine integration") {
    // compensation convention per family: compound Poisson and VG are raw,
    // CGMY is fully compensated, NIG is compensated plus its natural drift
    auto jump_part = [](const LevyModel& m, cd u) {
        return m.jump_exponent(u) - cd(0.0, 1.0) * u * 0.0;
    };
    const cd u(1.0, 0.0);
    const cd u2(2.3, 0.0);

    auto merton = zoo::merton();
    CHECK(std::abs(jump_part(merton, u) - oracle::lk_raw(merton, u)) < 1e-8);
    auto kou = zoo::kou();
    CHECK(std::abs(jump_part(kou, u2) - oracle::lk_raw(kou, u2)) < 1e-8);

    auto vg = zoo::vg();
    CHECK(std::abs(jump_part(vg, u) - oracle::lk_raw(vg, u)) < 1e-8);
    CHECK(std::abs(jump_part(vg, u2) - oracle::lk_raw(vg, u2)) < 1e-8);

    auto cgmy_lo = zoo::cgmy(1.0, 5.0, 10.0, 0.5);
    CHECK(std::abs(jump_part(cgmy_lo, u) - oracle::lk_compensated(cgmy_lo, u)) < 1e-8);
    auto cgmy_hi = zoo::cgmy(0.5, 5.0, 10.0, 1.5);
    CHECK(std::abs(jump_part(cgmy_hi, u) - oracle::lk_compensated(cgmy_hi, u)) < 1e-8);
    CHECK(std::abs(jump_part(cgmy_hi, u2) - oracle::lk_compensated(cgmy_hi, u2)) < 1e-8);

    auto nig = zoo::nig();
    const cd drift = cd(0.0, 1.0) * nig.natural_linear_drift();
    CHECK(std::abs(jump_part(nig, u) - drift * u - oracle::lk_compensated(nig, u)) < 1e-8);
    CHECK(std::abs(jump_part(nig, u2) - drift * u2 - oracle::lk_compensated(nig, u2)) < 1e-8);
}

TEST_CASE("psi: complex-strip evaluation matches quadrature off the real axis") {
    auto cgmy = zoo::cgmy(0.5, 5.0, 10.0, 1.5);
    const cd u(1.4, -2.0);  // inside the strip (-M, G) for Im(u)
    CHECK(std::abs(cgmy.jump_exponent(u) - oracle::lk_compensated(cgmy, u)) < 1e-8);
}

TEST_CASE("psi: strip violations raise an error naming the offending part") {
    auto kou = zoo::kou();  // strip (-8, 12)
    CHECK_THROWS_AS(kou.psi(cd(1.0, -12.5)), std::domain_error);
    CHECK_THROWS_AS(kou.psi(cd(1.0, 8.5)), std::domain_error);
    try {
        kou.psi(cd(1.0, -12.5));
    } catch (const std::domain_error& e) {
        CHECK(std::string(e.what()).find("-12.5") != std::string::npos);
    }
}

TEST_CASE("char_fn: identity at t=0 and modulus bound on the real line") {
    std::mt19937_64 rng(7103);
    for (auto f : zoo::kAllFamilies) {
        auto m = zoo::random_model(f, rng);
        CHECK(std::abs(m.char_fn(0.0, cd(3.0, 0.0)) - 1.0) == 0.0);
        for (double u : {0.5, 2.0, 40.0}) {
            CHECK(std::abs(m.char_fn(0.7, cd(u, 0.0))) <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("char_fn: Merton against empirical characteristic function") {
    auto m = zoo::merton(0.1, 0.03, 1.0, -0.1, 0.15);
    const double t = 1.0, u = 2.0;
    std::mt19937_64 rng(99);
    const int n = 1000000;
    double sr = 0.0, si = 0.0, sr2 = 0.0, si2 = 0.0;
    for (int k = 0; k < n; ++k) {
        const double x = oracle::draw_merton(rng, m, t);
        const double cr = std::cos(u * x), ci = std::sin(u * x);
        sr += cr;
        si += ci;
        sr2 += cr * cr;
        si2 += ci * ci;
    }
    const double mr = sr / n, mi = si / n;
    const double se_r = std::sqrt((sr2 / n - mr * mr) / n);
    const double se_i = std::sqrt((si2 / n - mi * mi) / n);
    const cd expect = m.char_fn(t, cd(u, 0.0));
    CHECK(std::abs(mr - expect.real()) < 3.0 * se_r);
    CHECK(std::abs(mi - expect.imag()) < 3.0 * se_i);
}

TEST_CASE("martingale_adjust: Black-Scholes drift") {
    auto q = zoo::bs(0.2, 0.37).martingale_adjusted();
    CHECK(q.drift() == doctest::Approx(-0.02).epsilon(1e-14));
}

TEST_CASE("martingale_adjust: Merton closed-form drift and exact martingale condition") {
    const double a = 0.1, lambda = 1.0, m = -0.1, d = 0.15;
    auto q = zoo::merton(a, 0.4, lambda, m, d).martingale_adjusted();
    const double expect = -(0.5 * a * a + lambda * (std::exp(m + 0.5 * d * d) - 1.0));
    CHECK(q.drift() == doctest::Approx(expect).epsilon(1e-13));
    CHECK(std::abs(q.psi(cd(0.0, -1.0))) < 1e-12);
}

TEST_CASE("martingale_adjust: every family satisfies the condition and is idempotent") {
    std::mt19937_64 rng(7104);
    for (auto f : zoo::kAllFamilies) {
        for (int rep = 0; rep < 3; ++rep) {
            auto m = zoo::random_model(f, rng);
            auto q = m.martingale_adjusted();
            CHECK(std::abs(q.psi(cd(0.0, -1.0))) < 1e-12);
            auto q2 = q.martingale_adjusted();
            CHECK(q2.drift() == doctest::Approx(q.drift()).epsilon(1e-14));
        }
    }
}

TEST_CASE("martingale_adjust: infeasible when e^x is not integrable") {
    LevyModel m({0.1, 0.0, KouJumps{1.0, 0.5, 0.9, 5.0}});  // eta_up < 1
    CHECK_THROWS_AS(m.martingale_adjusted(), std::domain_error);
}

TEST_CASE("quadratic_variation: pure diffusion and the psi identity") {
    CHECK(zoo::bs(0.2, 0.0).quadratic_variation() == doctest::Approx(0.04).epsilon(1e-14));
    std::mt19937_64 rng(7105);
    for (auto f : zoo::kAllFamilies) {
        for (int rep = 0; rep < 4; ++rep) {
            auto m = zoo::random_model(f, rng);
            if (!m.exp_moment_finite(2.0)) continue;
            const double A = m.quadratic_variation();
            const cd identity = m.psi(cd(0.0, -2.0)) - 2.0 * m.psi(cd(0.0, -1.0));
            CHECK(std::abs(A - identity.real()) < 1e-10 * (1.0 + std::abs(A)));
            CHECK(std::abs(identity.imag()) < 1e-12);
            CHECK(A > 0.0);
        }
    }
}

TEST_CASE("quadratic_variation: CGMY against quadrature of (e^z-1)^2 nu(dz)") {
    auto m = zoo::cgmy(1.0, 5.0, 10.0, 0.5, 0.13, 0.0);
    const cd byquad = oracle::nu_integral(m, [](double z) {
        const double e = std::expm1(z);
        return cd(e * e, 0.0);
    });
    CHECK(m.quadratic_variation() ==
          doctest::Approx(0.13 * 0.13 + byquad.real()).epsilon(1e-8));
}

TEST_CASE("quadratic_variation: domain error without second exponential moment") {
    auto tight = zoo::cgmy(1.0, 5.0, 1.5, 0.5);  // M = 1.5 < 2
    CHECK_THROWS_AS(tight.quadratic_variation(), std::domain_error);
}

TEST_CASE("metadata: Blumenthal-Getoor index and hypothesis flags per family") {
    auto bs = zoo::bs();
    CHECK(bs.bg_index() == 0.0);
    CHECK_FALSE(bs.h2());
    CHECK_FALSE(bs.h4());

    auto merton = zoo::merton();
    CHECK(merton.bg_index() == 0.0);
    CHECK(merton.h1());
    CHECK_FALSE(merton.h2());
    CHECK_FALSE(merton.h4());
    CHECK(merton.h3_holds(0.5));

    auto cgmy = zoo::cgmy(0.5, 5.0, 10.0, 1.5);
    CHECK(cgmy.bg_index() == 1.5);
    CHECK(cgmy.h2());
    CHECK(cgmy.h2_alpha() == 1.5);
    CHECK(cgmy.h4());
    CHECK(cgmy.f_plus() == 0.5);
    CHECK(cgmy.h3_holds(1.6));
    CHECK_FALSE(cgmy.h3_holds(1.5));  // not attained at the index itself

    auto vg = zoo::vg();
    CHECK(vg.h1());
    CHECK_FALSE(vg.h2());
    CHECK_FALSE(vg.h4());
    CHECK(vg.h3_holds(0.5));
    CHECK_FALSE(vg.h3_holds(0.0));

    auto nig = zoo::nig();
    CHECK(nig.bg_index() == 1.0);
    CHECK(nig.h4());
    CHECK(nig.f_plus() == doctest::Approx(0.3 / std::numbers::pi));
    CHECK(nig.h3_holds(1.2));
    CHECK_FALSE(nig.h3_holds(1.0));
}

TEST_CASE("metadata: NIG density matches the Bessel form near and away from zero") {
    auto m = zoo::nig(8.0, -2.0, 0.3);
    // near zero the density approaches delta/(pi x^2)
    const double x = 1e-5;
    CHECK(m.nu_density(x) * x * x == doctest::Approx(0.3 / std::numbers::pi).epsilon(1e-3));
    CHECK(m.nu_density(-x) * x * x == doctest::Approx(0.3 / std::numbers::pi).epsilon(1e-3));
}

TEST_CASE("growth bound: Re psi(u) <= Re psi(v) + 2 nu_0(R) for u >= v > 0") {
    std::mt19937_64 rng(7106);
    for (auto f : zoo::kAllFamilies) {
        auto m = zoo::random_model(f, rng);
        const double c = m.h1_growth_c();
        std::vector<double> grid;
        for (double lu = -1.0; lu <= 3.0; lu += 0.1) grid.push_back(std::pow(10.0, lu));
        for (size_t i = 0; i < grid.size(); ++i) {
            for (size_t j = 0; j <= i; ++j) {
                const double ru = m.psi(cd(grid[i], 0.0)).real();
                const double rv = m.psi(cd(grid[j], 0.0)).real();
                CHECK(ru <= rv + c + 1e-10);
            }
        }
    }
}

TEST_CASE("envelope: diffusion dominates with exact constants") {
    auto m = zoo::merton(0.2, 0.0, 1.0, -0.1, 0.15);
    const auto& env = m.envelope();
    CHECK(env.kind == Envelope::Kind::exponential);
    CHECK(env.alpha_eff == 2.0);
    CHECK(env.c == doctest::Approx(0.02).epsilon(1e-14));
}

TEST_CASE("envelope: CGMY exponential bound verified on the spec grid") {
    auto m = zoo::cgmy(0.5, 5.0, 10.0, 1.5);
    const auto& env = m.envelope();
    CHECK(env.kind == Envelope::Kind::exponential);
    CHECK(env.alpha_eff == 1.5);
    CHECK(env.c > 0.0);
    for (double t : {0.01, 0.1, 1.0}) {
        for (double lz = 0.0; lz <= 4.0; lz += 0.05) {
            for (double sgn : {-1.0, 1.0}) {
                const double z = sgn * std::pow(10.0, lz);
                const double lhs = std::abs(m.char_fn(t, cd(z, 0.0)));
                const double rhs =
                    std::exp(t * (env.offset - env.c * std::pow(std::abs(z), env.alpha_eff)));
                CHECK(lhs <= rhs * (1.0 + 1e-10));
            }
        }
    }
}

TEST_CASE("envelope: VG power-law descriptor verified on the grid") {
    auto m = zoo::vg();
    const auto& env = m.envelope();
    CHECK(env.kind == Envelope::Kind::power_law);
    CHECK(env.p_rate == doctest::Approx(2.0 / 0.2));  // 2C with C = 1/kappa
    for (double t : {0.01, 0.1, 1.0}) {
        for (double lz = 0.0; lz <= 4.0; lz += 0.05) {
            const double z = std::pow(10.0, lz);
            if (z < env.u0) continue;
            const double lhs = std::abs(m.char_fn(t, cd(z, 0.0)));
            const double rhs = std::exp(t * (env.p_offset - env.p_rate * std::log(z)));
            CHECK(lhs <= rhs * (1.0 + 1e-10));
        }
    }
}

TEST_CASE("envelope: none for pure-jump compound Poisson") {
    auto m = zoo::merton(0.0, 0.0, 1.0, -0.1, 0.2);
    CHECK(m.envelope().kind == Envelope::Kind::none);
}

TEST_CASE("market pair: drift adjustment and invariants") {
    auto pair = MarketPair::drift_adjusted(zoo::merton());
    CHECK(std::abs(pair.q().psi(cd(0.0, -1.0))) < 1e-12);
    // explicit Q with a different family is rejected
    CHECK_THROWS_AS(MarketPair(zoo::merton(), zoo::bs(0.2, -0.02).martingale_adjusted()),
                    std::invalid_argument);
    // explicit Q violating the martingale condition is rejected
    CHECK_THROWS_AS(MarketPair(zoo::bs(), zoo::bs(0.2, 0.1)), std::invalid_argument);
}

TEST_CASE("market pair: explicit Q with different jump parameters is allowed") {
    auto p = zoo::merton(0.1, 0.05, 1.0, -0.1, 0.15);
    auto q = zoo::merton(0.1, 0.0, 1.4, -0.08, 0.12).martingale_adjusted();
    MarketPair pair(p, q);
    CHECK(pair.q().triplet().a == 0.1);
}

TEST_CASE("validation: parameter range errors") {
    CHECK_THROWS_AS(LevyModel({-0.1, 0.0, NoJumps{}}), std::invalid_argument);
    CHECK_THROWS_AS(LevyModel({0.1, 0.0, CgmyJumps{1.0, 5.0, 0.9, 0.5}}), std::invalid_argument);
    CHECK_THROWS_AS(LevyModel({0.1, 0.0, CgmyJumps{1.0, 5.0, 10.0, 2.3}}), std::invalid_argument);
    CHECK_THROWS_AS(LevyModel({0.1, 0.0, NigJumps{2.0, 2.5, 0.3}}), std::invalid_argument);
}
