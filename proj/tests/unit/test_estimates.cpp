#include <doctest.h>

#include <cmath>

#include "subtail/comparability.hpp"
#include "subtail/estimates.hpp"
#include "subtail/numeric.hpp"

using namespace subtail;

namespace {

HKModel make_model(Family f, double alpha, double d, Geometry geo, double gamma = 0.5) {
    ModelParams p;
    p.family = f;
    p.alpha = alpha;
    p.d = d;
    p.gamma = gamma;
    return HKModel(p, geo);
}

}  // namespace

TEST_CASE("piecewise boundary functions") {
    const auto free = geometry_probe(Geometry::free_space(), 0.0, 0.5);
    CHECK(F_alpha_k(2.0, 1.0, 1.0, free) == doctest::Approx(2.0));
    // s = alpha with rho^alpha >= 2 / phi: the log+ term vanishes
    const auto far = geometry_probe(Geometry::free_space(), 0.0, 3.0);
    CHECK(F_alpha_k(1.0, 1.0, 1.0, far) == doctest::Approx(1.0));

    const auto g = geometry_probe(Geometry::interval(1.0), 0.1, 0.2);
    REQUIRE(g.rho == doctest::Approx(0.1));
    REQUIRE(g.delta_min == doctest::Approx(0.1));
    const double v = F_alpha_c(1.0, 1.5, 1e-3, g);
    const double dmax = g.delta_max;
    CHECK(v == doctest::Approx(std::sqrt(0.1) + std::sqrt(0.1) * std::log(std::max(0.1, 2 * dmax) / 0.1)));
}

TEST_CASE("boundary integral in the logarithmic case") {
    const HKModel m = make_model(Family::HK_J, 1.0, 1.0, Geometry::free_space(), 0.0);
    const BernsteinTable tab(make_caputo(0.5));
    // phi(1/t) = 1 / (8 e^2) puts the upper limit 1/(2 e^2 phi) at 4
    const double t = std::pow(8.0 * kE * kE, 2.0);
    const auto probe = geometry_probe(m.geometry(), 0.0, 1.0);
    CHECK(I_gamma_quadrature(m, tab, 1, t, probe).value == doctest::Approx(std::log(4.0)).epsilon(1e-8));
    CHECK(S_p(0.0, 1.0, 4.0, 1.0, 1.0).quadrature == doctest::Approx(std::log(4.0)).epsilon(1e-10));
    CHECK(J_gamma(m, tab, 1, t, probe) >= m.a_gamma(1, 1.0 / tab.phi(1.0 / t), probe) /
                                              m.V()(m.Phi().inverse(1.0 / tab.phi(1.0 / t))));

    // saturated boundary factors reproduce the gamma = 0 value
    const HKModel half = make_model(Family::HK_J, 1.0, 1.0, Geometry::half_line(), 0.5);
    const auto deep = geometry_probe(half.geometry(), 1e9, 1e9 + 1.0);
    CHECK(I_gamma_quadrature(half, tab, 1, t, deep).value == doctest::Approx(std::log(4.0)).epsilon(0.01));
}

TEST_CASE("closed form of the boundary integral") {
    const HKModel m = make_model(Family::HK_J, 1.0, 2.0, Geometry::interval(0.25), 0.5);
    const auto probe = geometry_probe(m.geometry(), 0.1, 0.15);
    REQUIRE(probe.delta_x == doctest::Approx(0.1));
    REQUIRE(probe.delta_y == doctest::Approx(0.1));
    const ClosedI c = closed_I_gamma(m, 1e-3, probe);
    CHECK(c.exponent_case == 'g');
    CHECK(c.scenario == 1);
    CHECK(c.value == doctest::Approx(40.0).epsilon(1e-9));
    CHECK(exponent_case(1.0, 1.0, 0.3) == 'f');
}

TEST_CASE("S_p asymptotics") {
    for (double A : {1e-3, 1e-1})
        for (double B : {10 * A, 1e3 * A}) {
            const auto s = S_p(0.2, A, B, 1.0, 1.5);
            CHECK(s.branch == "A");
            CHECK(s.quadrature / s.asymptotic >= 0.25);
            CHECK(s.quadrature / s.asymptotic <= 4.0);
            CHECK(s.quadrature >= s.endpoint_sum / 8);
        }
}

TEST_CASE("example estimates") {
    const Kernel trunc{TruncatedKernel{0.5, 1.0, 1.0}};
    const BernsteinTable tab(trunc);
    const auto conds = check_conditions(trunc);

    const HKModel d2 = make_model(Family::D2, 2.0, 1.0, Geometry::free_space());
    const EstimateLibrary lib(d2, tab, conds);
    CHECK(lib.evaluate("example1-small", 0.25, 0.0, 0.0).value == doctest::Approx(std::pow(0.25, -0.25)));

    const HKModel j2 = make_model(Family::J2, 1.0, 2.0, Geometry::free_space());
    const EstimateLibrary lib2(j2, tab, conds);
    REQUIRE(lib2.applies("main2-i", 1.75, 0.0, 0.5));
    const auto probe = geometry_probe(j2.geometry(), 0.0, 0.5);
    const double expected = boundary_integral(j2, 1, 0.5, 3.5, 2, probe) +
                            0.0625 * boundary_integral(j2, 1, 0.5, 3.5, 1, probe);
    CHECK(lib2.evaluate("main2-i", 1.75, 0.0, 0.5).value == doctest::Approx(expected).epsilon(1e-12));
    CHECK(std::isfinite(lib2.evaluate("example1-large", 2.5, 0.0, 0.0).value));
}

TEST_CASE("regime predicates") {
    const BernsteinTable tab(make_caputo(0.5));
    const HKModel m = make_model(Family::J2, 1.0, 1.0, Geometry::free_space());
    const EstimateLibrary lib(m, tab, check_conditions(tab.kernel()));
    const double edge = 1.0 / (8 * kE * kE);
    CHECK(lib.applies("specialsmall-i-a", 1.0, 0.0, 0.99 * edge));
    CHECK_FALSE(lib.applies("specialsmall-i-a", 1.0, 0.0, 1.01 * edge));
    CHECK_THROWS_AS(lib.evaluate("specialsmall-i-a", 1.0, 0.0, 2 * edge), RegimeError);

    GridOptions opt;
    const auto near = regime_grid_side(lib, "specialsmall-i-a", 9, opt);
    const auto off = regime_grid_side(lib, "specialsmall-ii-a", 9, opt);
    CHECK_FALSE(near.points.empty());
    CHECK_FALSE(off.points.empty());
    for (const auto& p : near.points) CHECK_FALSE(lib.applies("specialsmall-ii-a", p.t, p.x, p.y));
    for (const auto& p : off.points) CHECK_FALSE(lib.applies("specialsmall-i-a", p.t, p.x, p.y));
}

TEST_CASE("tag catalogue") {
    CHECK(estimate_tags().size() == 30);
    CHECK(theorem_of("mainsmall-ii-a") == "mainsmall");
}
