#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "subtail/numeric.hpp"
#include "subtail/simulation.hpp"

using namespace subtail;

namespace {

double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    return v[static_cast<std::size_t>(q * (v.size() - 1))];
}

}  // namespace

TEST_CASE("upper and lower tails against the half-stable law") {
    SimConfig cfg;
    cfg.n_paths = 100000;
    const Kernel k = make_caputo(0.5);
    const auto up = upper_tail_prob(k, cfg, 2.0, 1.0);
    const auto lo = lower_tail_prob(k, cfg, 2.0, 1.0);
    CHECK(std::abs(up.p - std::erf(1.0)) <= 4 * up.se);
    CHECK(std::abs(lo.p - std::erfc(1.0)) <= 4 * lo.se);
    CHECK(upper_tail_prob(k, cfg, 1.0, 1e-12).p == 1.0);
}

TEST_CASE("truncated subordinator mean") {
    SimConfig cfg;
    cfg.n_paths = 50000;
    const Kernel k{TruncatedKernel{0.5, 1.0, 1.0}};
    const std::vector<double> rs = {0.5, 2.0};
    const auto ens = sample_S_at(k, cfg, rs);
    for (std::size_t i = 0; i < rs.size(); ++i) {
        const auto col = ens.column(i);
        double m = 0, m2 = 0;
        for (double v : col) m += v, m2 += v * v;
        m /= col.size();
        const double se = std::sqrt((m2 / col.size() - m * m) / col.size());
        // r * integral_0^1 s * 0.5 s^-1.5 ds = r
        CHECK(std::abs(m - rs[i]) <= 4 * se);
    }
}

TEST_CASE("tiny r on a truncated kernel is mostly jump free") {
    SimConfig cfg;
    cfg.n_paths = 20000;
    const Kernel k{TruncatedKernel{0.5, 1.0, 1.0}};
    const double r = 1e-7;
    const std::vector<double> rs = {r};
    const auto ens = sample_S_at(k, cfg, rs);
    const double drift = r * k.small_jump_mean(cfg.cutoff_eps);
    std::size_t at_drift = 0;
    for (double v : ens.column(0)) at_drift += std::abs(v - drift) <= 1e-12 * (1 + drift);
    CHECK(double(at_drift) / cfg.n_paths == doctest::Approx(std::exp(-r * k.w(cfg.cutoff_eps))).epsilon(0.01));
}

TEST_CASE("paths are monotone in r") {
    SimConfig cfg;
    cfg.n_paths = 2000;
    const std::vector<double> rs = {2.0, 0.1, 0.5, 1.0};
    const auto ens = sample_S_at(make_caputo(0.5), cfg, rs);
    for (std::size_t p = 0; p < cfg.n_paths; ++p) {
        CHECK(ens.value(p, 1) <= ens.value(p, 2));
        CHECK(ens.value(p, 2) <= ens.value(p, 3));
        CHECK(ens.value(p, 3) <= ens.value(p, 0));
    }
}

TEST_CASE("exact stable sampler") {
    const auto s = exact_stable_ensemble(0.5, 1.0, 100000, 3);
    const double d = ks_distance(s, [](double t) { return std::erfc(1.0 / (2.0 * std::sqrt(t))); });
    CHECK(d < ks_critical_99(s.size()));
    // S_r has the law of r^2 S_1
    auto s3 = exact_stable_ensemble(0.5, 3.0, 100000, 4);
    for (double& v : s3) v /= 9.0;
    CHECK(ks_two_sample(s, s3) < ks_critical_99(s.size(), s3.size()));
}

TEST_CASE("compound Poisson sampler against the exact sampler at beta 0.9") {
    SimConfig cfg;
    cfg.n_paths = 10000;
    cfg.cutoff_eps = 1e-6;
    const std::vector<double> rs = {1.0};
    const auto ens = sample_S_at(make_caputo(0.9), cfg, rs);
    CHECK(ks_two_sample(ens.column(0), exact_stable_ensemble(0.9, 1.0, 10000, 5)) < ks_critical_99(10000, 10000));
}

TEST_CASE("inverse subordinator") {
    SimConfig cfg;
    cfg.n_paths = 40000;
    const Kernel k = make_caputo(0.5);
    const std::vector<double> ts = {1.0, 16.0};
    const std::vector<double> phis = {1.0, 0.25};
    const auto ens = sample_E_t(k, cfg, ts, phis);
    const auto e1 = ens.column(0), e16 = ens.column(1);
    CHECK(quantile(e1, 0.5) == doctest::Approx(2.0 * erf_inv(0.5)).epsilon(0.02));
    for (double q : {0.25, 0.5, 0.75}) CHECK(quantile(e16, q) / quantile(e1, q) == doctest::Approx(4.0).epsilon(0.02));
    for (std::size_t p = 0; p < cfg.n_paths; ++p) CHECK(e1[p] <= e16[p]);

    // P(E_t <= r) = P(S_r >= t) from an independent ensemble
    for (double r : {0.3, 1.0, 2.5}) {
        const auto direct = upper_tail_prob(k, cfg, r, 1.0);
        const double frac =
            double(std::count_if(e1.begin(), e1.end(), [&](double v) { return v <= r; })) / e1.size();
        const double pooled = std::sqrt(direct.se * direct.se + frac * (1 - frac) / e1.size());
        CHECK(std::abs(frac - direct.p) <= 3 * pooled);
    }
}

TEST_CASE("serial and OpenMP backends agree exactly") {
    SimConfig cfg;
    cfg.n_paths = 5000;
    const std::vector<double> rs = {0.2, 1.0};
    cfg.backend = Backend::Serial;
    const auto a = sample_S_at(make_caputo(0.5), cfg, rs);
    cfg.backend = Backend::OpenMP;
    const auto b = sample_S_at(make_caputo(0.5), cfg, rs);
    CHECK(a.values == b.values);

    const std::vector<double> ts = {1.0};
    const std::vector<double> phis = {1.0};
    cfg.backend = Backend::Serial;
    const auto c = sample_E_t(make_caputo(0.5), cfg, ts, phis);
    cfg.backend = Backend::OpenMP;
    const auto d = sample_E_t(make_caputo(0.5), cfg, ts, phis);
    CHECK(c.values == d.values);
}

TEST_CASE("invalid configurations are rejected") {
    SimConfig cfg;
    cfg.cutoff_eps = 2.0;
    CHECK_THROWS(validate(Kernel{TruncatedKernel{0.5, 1.0, 1.0}}, cfg));
    cfg.cutoff_eps = 1e-300;
    CHECK_THROWS(validate(make_caputo(0.9), cfg));
}
