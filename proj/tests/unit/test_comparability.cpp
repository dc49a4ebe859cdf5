#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "subtail/comparability.hpp"

using namespace subtail;

TEST_CASE("two-sided ratio checks") {
    const std::vector<double> obs = {1.0, 0.5, 0.01, 3.0};
    auto r = two_sided_check(obs, {}, obs, 8.0);
    CHECK(r.pass);
    CHECK(r.spread == doctest::Approx(1.0));

    std::vector<double> twice;
    for (double v : obs) twice.push_back(2 * v);
    r = two_sided_check(obs, {}, twice, 8.0);
    CHECK(r.pass);
    CHECK(r.spread == doctest::Approx(1.0));

    std::vector<double> bad = obs;
    bad[2] *= 100.0;
    const std::vector<GridPoint> pts = {{1, 0, 0}, {2, 0, 0}, {3, 0.5, 0.25}, {4, 0, 0}};
    r = two_sided_check(bad, {}, obs, 8.0, pts, "synthetic");
    CHECK_FALSE(r.pass);
    bool named = false;
    for (const auto& o : r.offenders) named = named || (o.index == 2 && o.point.t == 3 && o.point.y == 0.25);
    CHECK(named);
}

TEST_CASE("exponential constant fits") {
    std::vector<double> X, lr;
    for (int i = 0; i <= 40; ++i) {
        X.push_back(0.5 * i);
        lr.push_back(-2.0 * X.back());
    }
    auto fit = exp_constant_fit(lr, X);
    CHECK(fit.c == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(fit.signal);

    std::mt19937_64 gen(17);
    std::normal_distribution<double> noise(0.0, 0.05);
    for (auto& v : lr) v += std::log1p(noise(gen));
    fit = exp_constant_fit(lr, X);
    CHECK(fit.c >= 1.9);
    CHECK(fit.c <= 2.1);
    CHECK(fit.rms_residual <= 0.1);
}
