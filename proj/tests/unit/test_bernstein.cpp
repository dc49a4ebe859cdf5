#include <doctest.h>

#include <cmath>
#include <random>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>

#include "subtail/bernstein.hpp"
#include "subtail/numeric.hpp"

using namespace subtail;

namespace {

// Truncated kernel scale*(s^-beta - 1) on (0, 1]: phi by parts is
// scale * (lam^beta * lower_gamma(1 - beta, lam) - (1 - e^-lam)).
double truncated_phi_oracle(double beta, double scale, double lam) {
    return scale * (std::pow(lam, beta) * boost::math::tgamma_lower(1.0 - beta, lam) - (1.0 - std::exp(-lam)));
}

}  // namespace

TEST_CASE("stable Laplace exponent") {
    const BernsteinTable tab(make_caputo(0.5));
    CHECK(tab.phi(4.0) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(tab.phi(0.0) == 0.0);
    CHECK(tab.H(4.0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(tab.phi_prime(4.0) == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(tab.phi_inverse(2.0) == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(tab.H_inverse(1.0) == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(tab.b(2.0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(tab.b_inverse(1.0) == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(tab.bar_phi_alpha(2.0, 8.0) == doctest::Approx(4.0).epsilon(1e-8));
    CHECK(tab.bar_phi_alpha(2.0, 0.0) == 0.0);
}

TEST_CASE("truncated Laplace exponent against the incomplete gamma form") {
    const double scale = 1.0 / std::tgamma(0.5);
    const BernsteinTable tab(Kernel{TruncatedKernel{0.5, 1.0, scale}});
    for (double lam : {0.01, 0.3, 1.0, 7.0, 100.0, 1e4})
        CHECK(tab.phi(lam) == doctest::Approx(truncated_phi_oracle(0.5, scale, lam)).epsilon(1e-8));
    // s^2 / phi(s) = 8 solved on the oracle
    const auto [lo, hi] = boost::math::tools::bisect(
        [&](double s) { return s * s / truncated_phi_oracle(0.5, scale, s) - 8.0; }, 1.0, 10.0,
        boost::math::tools::eps_tolerance<double>(50));
    CHECK(tab.bar_phi_alpha(2.0, 8.0) == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-8));
}

TEST_CASE("phi - lam phi' = H on the grid") {
    for (const auto& [name, k] : builtin_kernels()) {
        INFO(name);
        const BernsteinTable tab(k);
        for (double lam : log_grid(1e-3, 1e3, 13))
            CHECK(tab.phi(lam) - lam * tab.phi_prime(lam) == doctest::Approx(tab.H(lam)).epsilon(1e-8));
    }
}

TEST_CASE("b is increasing and sandwiched") {
    for (const auto& [name, k] : builtin_kernels()) {
        INFO(name);
        const BernsteinTable tab(k);
        double prev = 0.0;
        for (double s : log_grid(1e-2, 1e2, 25)) {
            const double v = tab.b(s);
            CHECK(v > prev);
            prev = v;
        }
        const double inv = tab.b_inverse(1.0);
        CHECK(inv >= 1.0 / tab.phi(1.0) * (1 - 1e-9));
        CHECK(inv <= kSandwichConstant / tab.phi(1.0) * (1 + 1e-9));
    }
}

TEST_CASE("variational exponent M") {
    const PowerScale sq{2.0, 1.0};
    CHECK(calM(sq, 1.0, 2.0) == doctest::Approx(1.0).epsilon(1e-8));
    for (double l : {0.01, 0.5, 3.0, 40.0}) CHECK(calM(sq, sq(l), l) == doctest::Approx(0.25).epsilon(1e-8));
    const PowerScale cube{3.0, 1.0};
    CHECK(calM(cube, 1.0, 3.0) == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("variational exponent N") {
    const BernsteinTable tab(make_caputo(0.5));
    const PowerScale sq{2.0, 1.0};
    CHECK(calN(tab, sq, 1.0, 4.0) == doctest::Approx(3.0).epsilon(1e-7));
    for (double l : {0.5, 4.0, 30.0}) {
        double prev = kInf;
        for (double t : log_grid(1e-2, 1e1, 10)) {
            const double v = calN(tab, sq, t, l);
            CHECK(v <= prev * (1 + 1e-9));
            prev = v;
        }
    }
}
