#pragma once

// Shared model fixtures for the test suites.

#include <random>

#include "hedgelab/levy.hpp"

namespace zoo {

using namespace hedgelab;

inline LevyModel bs(double a = 0.2, double gamma = 0.01) {
    return LevyModel({a, gamma, NoJumps{}});
}

inline LevyModel merton(double a = 0.1, double gamma = 0.03, double lambda = 1.0,
                        double m = -0.1, double s = 0.15) {
    return LevyModel({a, gamma, MertonJumps{lambda, m, s}});
}

inline LevyModel kou(double a = 0.15, double gamma = 0.02, double lambda = 2.0,
                     double p = 0.4, double eu = 12.0, double ed = 8.0) {
    return LevyModel({a, gamma, KouJumps{lambda, p, eu, ed}});
}

inline LevyModel cgmy(double C = 1.0, double G = 5.0, double M = 10.0, double Y = 0.5,
                      double a = 0.0, double gamma = 0.0) {
    return LevyModel({a, gamma, CgmyJumps{C, G, M, Y}});
}

inline LevyModel vg(double sigma = 0.12, double theta = -0.14, double kappa = 0.2,
                    double gamma = 0.0) {
    return LevyModel({0.0, gamma, VgJumps{sigma, theta, kappa}});
}

inline LevyModel nig(double alpha = 8.0, double beta = -2.0, double delta = 0.3,
                     double gamma = 0.0, double a = 0.0) {
    return LevyModel({a, gamma, NigJumps{alpha, beta, delta}});
}

// one random model per family, parameters in sane desk ranges
inline LevyModel random_model(JumpFamily f, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    auto u = [&](double lo, double hi) { return lo + (hi - lo) * u01(rng); };
    switch (f) {
        case JumpFamily::none: return bs(u(0.05, 0.5), u(-0.1, 0.1));
        case JumpFamily::merton:
            return merton(u(0.05, 0.3), u(-0.1, 0.1), u(0.1, 3.0), u(-0.3, 0.2), u(0.05, 0.3));
        case JumpFamily::kou:
            return kou(u(0.05, 0.3), u(-0.1, 0.1), u(0.1, 3.0), u(0.1, 0.9), u(4.0, 20.0),
                       u(3.0, 20.0));
        case JumpFamily::cgmy: {
            double Y = u(0.2, 1.9);
            if (std::abs(Y - 1.0) < 0.05) Y = 1.2;
            return cgmy(u(0.1, 2.0), u(2.0, 10.0), u(3.0, 15.0), Y, u01(rng) < 0.5 ? 0.0 : u(0.05, 0.3),
                        u(-0.1, 0.1));
        }
        case JumpFamily::vg: return vg(u(0.08, 0.3), u(-0.3, 0.1), u(0.05, 0.6), u(-0.1, 0.1));
        case JumpFamily::nig: {
            const double alpha = u(4.0, 15.0);
            const double beta = u(-0.4, 0.4) * (alpha - 1.5);
            return nig(alpha, beta, u(0.1, 0.8), u(-0.1, 0.1));
        }
    }
    throw std::logic_error("random_model: bad family");
}

inline const JumpFamily kAllFamilies[] = {JumpFamily::none, JumpFamily::merton, JumpFamily::kou,
                                          JumpFamily::cgmy, JumpFamily::vg,     JumpFamily::nig};

}  // namespace zoo
