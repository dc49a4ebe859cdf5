#include "subtail/comparability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "subtail/numeric.hpp"

namespace subtail {

RatioReport two_sided_check(std::span<const double> observed, std::span<const double> se,
                            std::span<const double> predicted, double spread_budget, std::span<const GridPoint> points,
                            std::string case_tag) {
    if (observed.size() != predicted.size()) throw std::invalid_argument("two_sided_check: grids are not aligned");
    if (!se.empty() && se.size() != observed.size()) throw std::invalid_argument("two_sided_check: se grid is not aligned");
    if (!points.empty() && points.size() != observed.size())
        throw std::invalid_argument("two_sided_check: point labels are not aligned");
    if (observed.empty()) throw std::invalid_argument("two_sided_check: empty grid");
    RatioReport rep;
    rep.case_tag = std::move(case_tag);
    rep.n_points = observed.size();
    rep.budget = spread_budget;

    auto label = [&](std::size_t i) { return points.empty() ? GridPoint{} : points[i]; };
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (!(predicted[i] > 0) || !std::isfinite(predicted[i])) {
            std::ostringstream os;
            os << "predicted value " << predicted[i] << " is not positive and finite at index " << i;
            if (!points.empty()) os << " (t = " << points[i].t << ", x = " << points[i].x << ", y = " << points[i].y << ")";
            rep.failure = os.str();
            rep.offenders.push_back({i, label(i), 0.0});
            rep.spread = rep.envelope_spread = kInf;
            return rep;
        }
    }
    std::vector<double> ratio(observed.size());
    rep.ratio_min = kInf;
    rep.ratio_max = 0.0;
    rep.envelope_min = kInf;
    rep.envelope_max = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        ratio[i] = observed[i] / predicted[i];
        rep.ratio_min = std::min(rep.ratio_min, ratio[i]);
        rep.ratio_max = std::max(rep.ratio_max, ratio[i]);
        double s = se.empty() ? 0.0 : 3.0 * se[i];
        rep.envelope_min = std::min(rep.envelope_min, std::max(0.0, observed[i] - s) / predicted[i]);
        rep.envelope_max = std::max(rep.envelope_max, (observed[i] + s) / predicted[i]);
    }
    rep.spread = rep.ratio_min > 0 ? rep.ratio_max / rep.ratio_min : kInf;
    rep.envelope_spread = rep.envelope_min > 0 ? rep.envelope_max / rep.envelope_min : kInf;

    std::vector<std::size_t> order(ratio.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ratio[a] < ratio[b]; });
    const std::size_t keep = std::min<std::size_t>(3, order.size());
    for (std::size_t i = 0; i < keep; ++i) rep.offenders.push_back({order[i], label(order[i]), ratio[order[i]]});
    for (std::size_t i = 0; i < keep; ++i) {
        std::size_t j = order[order.size() - 1 - i];
        if (order.size() - 1 - i < keep) break;
        rep.offenders.push_back({j, label(j), ratio[j]});
    }
    rep.pass = std::isfinite(rep.envelope_spread) && rep.envelope_spread <= spread_budget;
    if (!rep.pass) {
        std::ostringstream os;
        os.precision(6);
        os << "envelope spread " << rep.envelope_spread << " exceeds budget " << spread_budget;
        rep.failure = os.str();
    }
    return rep;
}

ExpFit exp_constant_fit(std::span<const double> log_ratio, std::span<const double> X, std::span<const double> log_se) {
    if (log_ratio.size() != X.size() || X.size() < 3) throw std::invalid_argument("exp_constant_fit: need >= 3 aligned points");
    for (double v : log_ratio)
        if (!std::isfinite(v)) throw std::invalid_argument("exp_constant_fit: log ratio must be finite");
    ExpFit fit;
    const auto [xmin, xmax] = std::minmax_element(X.begin(), X.end());
    if (!(*xmin > 0) || *xmax / *xmin < std::pow(10.0, 1.5))
        fit.diagnostic = "exponent argument spans fewer than 1.5 decades";
    LinearFit lf = least_squares(X, log_ratio);
    fit.c = -lf.slope;
    fit.intercept = lf.intercept;
    fit.residual = lf.max_abs_residual;
    double ss = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        double r = log_ratio[i] - (lf.intercept + lf.slope * X[i]);
        ss += r * r;
    }
    fit.rms_residual = std::sqrt(ss / static_cast<double>(X.size()));
    fit.t_stat = lf.slope_se > 0 ? std::abs(lf.slope) / lf.slope_se : kInf;
    fit.signal = fit.t_stat >= 2.0 && fit.c > 0;
    if (!fit.signal) fit.diagnostic = fit.diagnostic.empty() ? "no exponential signal" : fit.diagnostic + "; no exponential signal";
    fit.c_low = fit.c_high = fit.c;
    if (!log_se.empty()) {
        if (log_se.size() != X.size()) throw std::invalid_argument("exp_constant_fit: se grid is not aligned");
        // shift by 3 se in opposite directions at the two ends of X to bound the slope
        std::vector<double> up(X.size()), down(X.size());
        const double mid = 0.5 * (*xmin + *xmax);
        for (std::size_t i = 0; i < X.size(); ++i) {
            double s = 3.0 * log_se[i] * (X[i] < mid ? 1.0 : -1.0);
            up[i] = log_ratio[i] + s;
            down[i] = log_ratio[i] - s;
        }
        double c1 = -least_squares(X, up).slope, c2 = -least_squares(X, down).slope;
        fit.c_low = std::min({c1, c2, fit.c});
        fit.c_high = std::max({c1, c2, fit.c});
    }
    return fit;
}

namespace {

// lo * (hi/lo)^(i/(n-1)); the grid with 2n-1 points contains this one exactly
std::vector<double> nested_log_grid(double lo, double hi, std::size_t n) {
    if (n == 1) return {std::sqrt(lo * hi)};
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
    return out;
}

std::pair<double, double> default_t_range(const EstimateLibrary& lib, const std::string& tag) {
    const std::string th = theorem_of(tag);
    const auto& c = lib.conditions();
    const double T = lib.settings().horizon;
    if (th == "specialtrunc" || th == "main2" || tag == "example1-large") {
        double t_f = c.trunc ? c.trunc->t_f : 1.0;
        if (const auto* k = std::get_if<TruncatedKernel>(&lib.table().kernel().spec())) t_f = k->delta;
        return {t_f / 2.0, 5.0 * t_f};
    }
    if (th == "speciallarge" || th == "mainlarge" || th == "mainsub" || th == "specialsub" || tag == "example2-iii")
        return {T, 100.0 * T};
    double top = 1.0;
    if (c.spoly) top = std::min(top, c.spoly->horizon);
    if (tag == "example1-small") {
        if (const auto* k = std::get_if<TruncatedKernel>(&lib.table().kernel().spec())) top = k->delta / 2.0;
    }
    return {1e-4 * top, top};
}

// candidate (x, y) pairs with x < y
std::vector<std::pair<double, double>> spatial_pairs(const Geometry& g, std::size_t side) {
    std::vector<double> pos;
    switch (g.kind()) {
        case GeometryKind::Interval: {
            const double L = g.length();
            for (double d : nested_log_grid(1e-3 * L, 0.5 * L, (side + 1) / 2 + 1)) {
                pos.push_back(d);
                if (d < 0.5 * L) pos.push_back(L - d);
            }
            break;
        }
        case GeometryKind::HalfLine: pos = nested_log_grid(1e-3, 1e2, side); break;
        case GeometryKind::Exterior:
            for (double d : nested_log_grid(1e-3, 1e2, side)) pos.push_back(1.0 + d);
            break;
        case GeometryKind::Free: {
            std::vector<std::pair<double, double>> out;
            for (double r : nested_log_grid(1e-4, 1e2, side * side / 2 + 1)) out.emplace_back(0.0, r);
            return out;
        }
    }
    std::sort(pos.begin(), pos.end());
    pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < pos.size(); ++i)
        for (std::size_t j = i + 1; j < pos.size(); ++j) out.emplace_back(pos[i], pos[j]);
    return out;
}

}  // namespace

RegimeGrid regime_grid_side(const EstimateLibrary& lib, const std::string& tag, std::size_t side,
                            const GridOptions& opt) {
    auto [t_lo, t_hi] = default_t_range(lib, tag);
    if (opt.t_lo > 0) t_lo = opt.t_lo;
    if (opt.t_hi > 0) t_hi = opt.t_hi;
    RegimeGrid grid;
    grid.tag = tag;
    const auto pairs = spatial_pairs(lib.model().geometry(), side);
    for (double t : nested_log_grid(t_lo, t_hi, side)) {
        for (const auto& [x, y] : pairs) {
            ++grid.candidates;
            if (lib.applies(tag, t, x, y)) grid.points.push_back({t, x, y});
        }
    }
    return grid;
}

RegimeGrid regime_grid(const EstimateLibrary& lib, const std::string& tag, std::size_t resolution,
                       const GridOptions& opt) {
    std::size_t side = std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(std::cbrt(2.0 * resolution))));
    RegimeGrid grid;
    for (int level = 0; level <= opt.refinements; ++level) {
        grid = regime_grid_side(lib, tag, side, opt);
        if (grid.points.size() >= resolution) break;
        side = 2 * side - 1;
    }
    grid.requested = resolution;
    if (grid.points.size() < resolution) {
        std::ostringstream os;
        os << "only " << grid.points.size() << " of " << grid.candidates << " candidates are admissible for " << tag
           << " (requested " << resolution << ")";
        grid.note = os.str();
    }
    return grid;
}

}  // namespace subtail
