#include <doctest.h>

#include <cmath>

#include "subtail/numeric.hpp"
#include "subtail/simulation.hpp"
#include "subtail/tail_theory.hpp"

using namespace subtail;

TEST_CASE("universal lower bound") {
    const BernsteinTable tab(make_caputo(0.5));
    const TailTheory th(tab, check_conditions(tab.kernel()));
    CHECK(th.lower_bound_universal(0.01, 1.0, 0.01) == doctest::Approx(0.0054905).epsilon(1e-4));
    const double a = th.lower_bound_universal(1e-6, 1.0, 2e-6);
    const double b = th.lower_bound_universal(2e-6, 1.0, 2e-6);
    CHECK(b / a == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("upper tail forms") {
    SUBCASE("truncated") {
        const BernsteinTable tab(Kernel{TruncatedKernel{0.5, 1.0, 1.0}});
        const TailTheory th(tab, check_conditions(tab.kernel()));
        CHECK(TailTheory::n_t(1.75, 1.0) == 2);
        CHECK(TailTheory::n_t(0.5, 1.0) == 1);
        const double r = th.truncated_r_max() / 2;
        const UpperForm f = th.upper_bound_form(r, 1.75);
        CHECK(f.tag == RegimeTag::TruncatedSmallR);
        CHECK(f.n == 2);
        CHECK(f.prefactor == doctest::Approx((r + 0.0625) * r * r).epsilon(1e-12));
    }
    SUBCASE("subexponential") {
        const BernsteinTable tab(Kernel{SubexpKernel{0.5, 1.0, 1.0, 0.5}});
        const TailTheory th(tab, check_conditions(tab.kernel()));
        const UpperForm f = th.upper_bound_form(0.1, 9.0);
        CHECK(f.tag == RegimeTag::Subexp);
        CHECK(f.value == doctest::Approx(0.1 * std::exp(-1.5)).epsilon(1e-10));
    }
    SUBCASE("small-time power") {
        const BernsteinTable tab(make_caputo(0.5));
        const TailTheory th(tab, check_conditions(tab.kernel()));
        const double r = kRegimeBound / 2 / 2.0 / 2.0;
        const UpperForm f = th.upper_bound_form(r, 0.25);
        CHECK(f.tag == RegimeTag::SmallTimePoly);
        CHECK(f.value == doctest::Approx(r * 2 / std::sqrt(M_PI)).epsilon(1e-10));
    }
}

TEST_CASE("lower tail bound") {
    const BernsteinTable tab(make_caputo(0.5));
    const TailTheory th(tab, check_conditions(tab.kernel()));
    const auto lb = th.lower_tail_bounds(4.0, 1.0, 1.0);
    CHECK(lb.exponent == doctest::Approx(4.0).epsilon(1e-8));
    CHECK(lb.upper == doctest::Approx(std::exp(-4.0)).epsilon(1e-8));
    CHECK_THROWS_AS(th.lower_tail_bounds(0.1, 1.0, 1.0), RegimeError);
    double prev = 0;
    for (double r : {4.0, 6.0, 10.0, 20.0}) {
        const double e = th.lower_tail_bounds(r, 1.0, 1.0).exponent;
        CHECK(e > prev);
        prev = e;
    }
}

TEST_CASE("bounds dominate Monte Carlo estimates") {
    SimConfig cfg;
    cfg.n_paths = 40000;
    const BernsteinTable tab(make_caputo(0.5));
    const TailTheory th(tab, check_conditions(tab.kernel()));
    for (double r : {4.0, 6.0}) {
        const auto b = th.lower_tail_bounds(r, 1.0, 1.0);
        const auto mc = lower_tail_prob(tab.kernel(), cfg, r, 1.0);
        CHECK(mc.p <= b.upper + 3 * mc.se);
    }
    for (double t : {0.01, 0.1}) {
        const double r = kRegimeBound / (4 * tab.phi(1.0 / t));
        const auto mc = upper_tail_prob(tab.kernel(), cfg, r, t);
        CHECK(mc.p + 3 * mc.se >= th.lower_bound_universal(r, t, r * tab.phi(1.0 / t)));
    }
}

TEST_CASE("regime classification") {
    const BernsteinTable tab(make_caputo(0.5));
    const TailTheory th(tab, check_conditions(tab.kernel()));
    const double t = 0.25;
    const double edge = kRegimeBound / tab.phi(1.0 / t);
    CHECK(th.classify(edge / 4, t).tag == RegimeTag::SmallTimePoly);
    CHECK(th.classify(edge * 4, t).tag != RegimeTag::SmallTimePoly);
}
