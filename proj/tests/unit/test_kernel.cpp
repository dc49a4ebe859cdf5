#include <doctest.h>

#include <cmath>
#include <random>

#include "subtail/kernel.hpp"

using namespace subtail;

TEST_CASE("tail kernel values") {
    const Kernel caputo{PowerKernel{0.5, 1.0 / std::tgamma(0.5)}};
    CHECK(caputo.w(1.0) == doctest::Approx(1.0 / std::sqrt(M_PI)).epsilon(1e-12));
    CHECK(caputo.levy_density(1.0) == doctest::Approx(0.5 / std::sqrt(M_PI)).epsilon(1e-12));

    const Kernel trunc{TruncatedKernel{0.5, 1.0, 1.0}};
    CHECK(trunc.w(1.0) == 0.0);
    CHECK(trunc.w(2.0) == 0.0);
    CHECK(trunc.levy_density(0.25) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(trunc.levy_density(2.0) == 0.0);
    CHECK(trunc.support_end() == 1.0);

    const Kernel sub{SubexpKernel{1.0, 1.0, 1.0, 0.5}};
    double far = -1.0;
    CHECK_NOTHROW(far = sub.w(1e9));
    CHECK(far == 0.0);
}

TEST_CASE("inverse of the tail kernel") {
    CHECK(Kernel{PowerKernel{0.5, 1.0}}.inverse_w(2.0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(Kernel{TruncatedKernel{0.5, 1.0, 1.0}}.inverse_w(1.0) == doctest::Approx(0.25).epsilon(1e-12));

    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> log_s(std::log(1e-6), std::log(0.9));
    for (const auto& [name, k] : builtin_kernels()) {
        INFO(name);
        for (int i = 0; i < 50; ++i) {
            const double s0 = std::exp(log_s(gen));
            const double y = k.w(s0);
            if (!(y > 0) || !k.atoms().empty()) continue;
            CHECK(k.inverse_w(y) == doctest::Approx(s0).epsilon(1e-10));
        }
    }
}

TEST_CASE("tail kernels are non-increasing") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> log_s(std::log(1e-8), std::log(1e4));
    for (const auto& [name, k] : builtin_kernels()) {
        INFO(name);
        for (int i = 0; i < 200; ++i) {
            double a = std::exp(log_s(gen)), b = std::exp(log_s(gen));
            if (a > b) std::swap(a, b);
            CHECK(k.w(a) >= k.w(b));
        }
    }
}

TEST_CASE("tabulated kernel with an atom") {
    TabulatedKernel tab;
    tab.knots = {{0.01, 10.0}, {0.5, 2.0}, {0.5, 1.0}, {2.0, 0.5}};
    const Kernel k{tab};
    const auto atoms = k.atoms();
    REQUIRE(atoms.size() == 1);
    CHECK(atoms[0].s == 0.5);
    CHECK(atoms[0].mass == doctest::Approx(1.0));
    CHECK_THROWS_AS(k.levy_density(0.5), AtomHere);
}

TEST_CASE("condition checks") {
    const auto power = check_conditions(make_caputo(0.5));
    CHECK(power.ker_ok);
    REQUIRE(power.spoly);
    REQUIRE(power.lpoly);
    CHECK(power.spoly->exponent == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(power.lpoly->exponent == doctest::Approx(0.5).epsilon(1e-6));
    CHECK_FALSE(power.sub);
    CHECK_FALSE(power.trunc);

    const auto trunc = check_conditions(Kernel{TruncatedKernel{0.5, 1.0, 1.0}});
    REQUIRE(trunc.trunc);
    CHECK(trunc.trunc->t_f == doctest::Approx(1.0));
    // secant slopes of s^-1/2 - 1 on [1/4, 1] lie between the derivative bounds 1/2 and 4
    CHECK(trunc.trunc->slope_min >= 0.5);
    CHECK(trunc.trunc->slope_min <= 0.5 * 1.1);
    CHECK(trunc.trunc->slope_max <= 4.0);
    CHECK(trunc.trunc->slope_max >= 4.0 * 0.8);
    CHECK(trunc.trunc->K == doctest::Approx(std::max(trunc.trunc->slope_max, 1.0 / trunc.trunc->slope_min)));
    REQUIRE(trunc.spoly);
    CHECK(trunc.spoly->horizon == doctest::Approx(0.5));
    CHECK(trunc.spoly->exponent == doctest::Approx(0.5).epsilon(0.05));

    const auto sub = check_conditions(Kernel{SubexpKernel{0.5, 1.0, 1.0, 0.5}});
    REQUIRE(sub.sub);
    CHECK(sub.sub->beta == 0.5);
    CHECK(sub.sub->theta == 1.0);
}

TEST_CASE("five built-in variants") {
    const auto ks = builtin_kernels();
    CHECK(ks.size() == 5);
    for (const auto& [name, k] : ks) CHECK(check_conditions(k).ker_ok);
}
