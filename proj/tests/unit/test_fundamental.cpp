#include <doctest.h>

#include <cmath>
#include <vector>

#include "subtail/bernstein.hpp"
#include "subtail/fundamental.hpp"

using namespace subtail;

namespace {

HKModel free_j(double alpha = 1.0, double d = 1.0) {
    ModelParams p;
    p.family = Family::J2;
    p.alpha = alpha;
    p.d = d;
    return HKModel(p, Geometry::free_space());
}

}  // namespace

TEST_CASE("time-change density is normalized") {
    for (double t : {0.01, 1.0, 50.0}) {
        const HalfStableDensity g(t);
        const auto one = p_quadrature([](double) { return 1.0; }, g);
        CHECK(one.value == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("exponential diagnostic kernel") {
    const HalfStableDensity g(1.0);
    const auto v = p_quadrature([](double r) { return std::exp(-r); }, g);
    CHECK(v.value == doctest::Approx(std::exp(1.0) * std::erfc(1.0)).epsilon(1e-9));
    for (double t : {0.1, 4.0}) {
        const HalfStableDensity gt(t);
        CHECK(p_quadrature([](double r) { return std::exp(-r); }, gt).value ==
              doctest::Approx(std::exp(t) * std::erfc(std::sqrt(t))).epsilon(1e-9));
    }
}

TEST_CASE("quadrature and Monte Carlo agree") {
    // d < alpha keeps the diagonal finite
    const HKModel m = free_j(1.5, 1.0);
    const Kernel k = make_caputo(0.5);
    const BernsteinTable tab(k);
    SimConfig cfg;
    cfg.n_paths = 20000;
    const std::vector<double> ts = {0.1, 0.5, 1.0, 4.0};
    std::vector<double> phis;
    for (double t : ts) phis.push_back(tab.phi(1.0 / t));
    const auto ens = sample_E_t(k, cfg, ts, phis);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const HalfStableDensity g(ts[i]);
        for (double rho : {0.0, 0.1, 1.0, 10.0}) {
            const double q = p_quadrature(m, g, 0.0, rho).value;
            const auto mc = p_mc(m, ens, i, 0.0, rho);
            CHECK(std::abs(q - mc.value) <= 3 * mc.se + 1e-3 * q);
            CHECK(mc.value == doctest::Approx(p_mc(m, ens, i, rho, 0.0).value).epsilon(1e-12));
        }
    }
}

TEST_CASE("solutions") {
    ModelParams p;
    p.family = Family::J1;
    p.alpha = 1.5;
    p.d = 1.0;
    const HKModel m(p, Geometry::interval(1.0));
    const HalfStableDensity g(0.5);
    const auto odd = solve_u(m, g, 0.5, [](double y) { return y - 0.5; });
    CHECK(std::abs(odd.value) <= std::max(odd.error, 1e-9));

    const HKModel f = free_j(1.5);
    const auto mass = solve_u(f, g, 0.0, [](double) { return 1.0; }, SolveOptions{1e-6});
    CHECK(std::isfinite(mass.value));
    CHECK(mass.value > 0.0);
}

TEST_CASE("small-time law of the inverse subordinator") {
    const Kernel trunc{TruncatedKernel{0.5, 1.0, 1.0}};
    CHECK(small_time_law(trunc, 0.5).n_jumps == 1);
    CHECK(small_time_law(trunc, 1.5).n_jumps == 2);
    CHECK(small_time_law(trunc, 2.5).n_jumps == 3);
    // one jump: A = nu((t, 1]) = w(t)
    CHECK(small_time_law(trunc, 0.5).coefficient == doctest::Approx(trunc.w(0.5)).epsilon(1e-8));
}

TEST_CASE("diagonal finiteness threshold") {
    const Kernel trunc{TruncatedKernel{0.5, 1.0, 1.0}};
    const HKModel m = free_j(1.0, 2.0);
    CHECK(diagonal_probe(trunc, m, 1.5, 0.0).divergent);
    const auto fine = diagonal_probe(trunc, m, 2.5, 0.0);
    CHECK(fine.converged);
    CHECK_FALSE(fine.divergent);
}
