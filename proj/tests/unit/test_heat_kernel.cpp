#include <doctest.h>

#include <cmath>
#include <random>

#include "subtail/heat_kernel.hpp"

using namespace subtail;

TEST_CASE("geometry probes") {
    const auto a = geometry_probe(Geometry::interval(1.0), 0.3, 0.8);
    CHECK(a.delta_x == doctest::Approx(0.3));
    CHECK(a.delta_y == doctest::Approx(0.2));
    CHECK(a.rho == doctest::Approx(0.5));
    CHECK(a.delta_min == doctest::Approx(0.2));
    CHECK(a.delta_max == doctest::Approx(0.3));
    CHECK(a.delta_star == doctest::Approx(0.06));

    const auto b = geometry_probe(Geometry::half_line(), 2.0, 5.0);
    CHECK(b.delta_x == 2.0);
    CHECK(b.delta_y == 5.0);
    CHECK(b.rho == 3.0);

    const auto c = geometry_probe(Geometry::exterior(), -3.0, 2.0);
    CHECK(c.delta_x == 2.0);
    CHECK(c.delta_y == 1.0);
    CHECK(c.rho == 5.0);

    CHECK(std::isinf(geometry_probe(Geometry::free_space(), 0.0, 1.0).delta_x));
    CHECK_THROWS(Geometry::interval(1.0).delta(1.5));
    CHECK(geometry_kind_from_string("half-line") == GeometryKind::HalfLine);
}

TEST_CASE("boundary factors") {
    ModelParams p;
    p.family = Family::HK_J;
    p.alpha = 1.0;
    p.gamma = 0.5;
    const HKModel m(p, Geometry::interval(1.0));
    const auto g = geometry_probe(m.geometry(), 0.25, 0.75);
    const double t = m.Phi()(0.25);
    CHECK(m.a_gamma(1, t, g) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(m.a_gamma(1, t, g, 0.0) == 1.0);
    CHECK(m.a_gamma(2, 1.0, g) == doctest::Approx(m.a_gamma(1, 0.5, g)).epsilon(1e-12));
}

TEST_CASE("representative transition densities") {
    ModelParams j;
    j.family = Family::J2;
    j.alpha = 1.0;
    j.d = 1.0;
    const HKModel free_j(j, Geometry::free_space());
    CHECK(free_j.q(1.0, 0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-12));

    ModelParams d;
    d.family = Family::D2;
    d.alpha = 2.0;
    d.d = 1.0;
    const HKModel half(d, Geometry::half_line());
    const double v = half.q(1.0, 1e6, 1e6 + 2.0);
    CHECK(v == doctest::Approx(std::exp(-4.0)).epsilon(1e-3));
}

TEST_CASE("jump kernel sandwich") {
    ModelParams j;
    j.family = Family::HK_J;
    j.alpha = 1.5;
    j.d = 1.0;
    j.gamma = 0.0;
    const HKModel m(j, Geometry::free_space());
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(std::log(1e-4), std::log(1e4));
    for (int i = 0; i < 500; ++i) {
        const double t = std::exp(u(gen)), l = std::exp(u(gen));
        const double q = m.q_jump(t, l);
        const double lhs = std::min(1.0 / m.V()(m.Phi().inverse(t)), t / (m.Psi()(l) * m.V()(l)));
        CHECK(q / lhs >= 0.5 - 1e-12);
        CHECK(q / lhs <= 1.0 + 1e-12);
    }
}

TEST_CASE("q is symmetric in x and y") {
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> pos(0.001, 0.999), logt(std::log(1e-3), std::log(10.0));
    for (Family f : {Family::J1, Family::J2, Family::J3, Family::J4, Family::D1, Family::D2, Family::D3,
                     Family::HK_J, Family::HK_D, Family::HK_M}) {
        ModelParams p;
        p.family = f;
        p.alpha = is_diffusion_family(f) ? 2.0 : 1.5;
        p.d = 1.0;
        const HKModel m(p, Geometry::interval(1.0));
        INFO(to_string(f));
        for (int i = 0; i < 50; ++i) {
            const double t = std::exp(logt(gen)), x = pos(gen), y = pos(gen);
            CHECK(m.q(t, x, y) == doctest::Approx(m.q(t, y, x)).epsilon(1e-12));
            CHECK(m.q(t, x, y) >= 0.0);
        }
    }
}

TEST_CASE("family names round trip") {
    for (Family f : {Family::J1, Family::D3, Family::HK_M}) CHECK(family_from_string(to_string(f)) == f);
    CHECK_THROWS(family_from_string("nope"));
}
