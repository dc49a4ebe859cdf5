#include "subtail/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "subtail/numeric.hpp"

namespace subtail {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

using Knot = TabulatedKernel::Knot;

// log-log slope of a non-degenerate segment (negative for decreasing w)
double seg_slope(const Knot& a, const Knot& b) {
    return std::log(b.w / a.w) / std::log(b.s / a.s);
}

double first_slope(const TabulatedKernel& t) { return seg_slope(t.knots[0], t.knots[1]); }

double last_slope(const TabulatedKernel& t) {
    const auto n = t.knots.size();
    return seg_slope(t.knots[n - 2], t.knots[n - 1]);
}

bool truncated_tail(const TabulatedKernel& t) { return t.tail == TailClass::Truncated; }

// Segment between knots i and i+1 evaluated at s (s_i < s < s_{i+1}).
double seg_value(const TabulatedKernel& t, std::size_t i, double s) {
    const Knot& a = t.knots[i];
    const Knot& b = t.knots[i + 1];
    if (truncated_tail(t) && i + 2 == t.knots.size())
        return a.w * (b.s - s) / (b.s - a.s);
    return a.w * std::pow(s / a.s, seg_slope(a, b));
}

double seg_density(const TabulatedKernel& t, std::size_t i, double s) {
    const Knot& a = t.knots[i];
    const Knot& b = t.knots[i + 1];
    if (truncated_tail(t) && i + 2 == t.knots.size()) return a.w / (b.s - a.s);
    return -seg_slope(a, b) * seg_value(t, i, s) / s;
}

void validate(const PowerKernel& k) {
    require(k.beta > 0 && k.beta < 1, "power: beta must lie in (0,1)");
    require(k.scale > 0 && std::isfinite(k.scale), "power: scale must be positive");
}

void validate(const TruncatedKernel& k) {
    require(k.beta > 0 && k.beta < 1, "truncated: beta must lie in (0,1)");
    require(k.delta > 0 && std::isfinite(k.delta), "truncated: delta must be positive");
    require(k.scale > 0 && std::isfinite(k.scale), "truncated: scale must be positive");
}

void validate(const SubexpKernel& k) {
    require(k.beta > 0 && k.beta <= 1, "subexp: beta must lie in (0,1]");
    require(k.theta > 0, "subexp: theta must be positive");
    require(k.c0 > 0, "subexp: c0 must be positive");
    require(k.small_beta > 0 && k.small_beta < 1, "subexp: small_beta must lie in (0,1)");
}

void validate(const DistributedKernel& k) {
    require(!k.weights.empty(), "distributed: weights must be non-empty");
    for (const auto& term : k.weights) {
        require(term.beta > 0 && term.beta < 1, "distributed: every beta must lie in (0,1)");
        require(term.kappa > 0, "distributed: every kappa must be positive");
    }
}

void validate(const TabulatedKernel& k) {
    const auto& kn = k.knots;
    require(kn.size() >= 2, "tabulated: need at least two knots");
    const std::size_t n = kn.size();
    for (std::size_t i = 0; i < n; ++i) {
        require(kn[i].s > 0 && std::isfinite(kn[i].s), "tabulated: abscissae must be positive");
        bool last_zero = truncated_tail(k) && i + 1 == n;
        if (last_zero)
            require(kn[i].w == 0.0, "tabulated: truncated tail needs w = 0 at the last knot");
        else
            require(kn[i].w > 0 && std::isfinite(kn[i].w), "tabulated: values must be positive");
        if (i == 0) continue;
        require(kn[i].s >= kn[i - 1].s, "tabulated: abscissae must be non-decreasing");
        require(kn[i].w < kn[i - 1].w, "tabulated: values must be strictly decreasing");
        if (i >= 2) require(!(kn[i].s == kn[i - 1].s && kn[i - 1].s == kn[i - 2].s),
                            "tabulated: at most two knots may share an abscissa");
    }
    require(kn[1].s > kn[0].s, "tabulated: first segment must have positive length");
    require(kn[n - 1].s > kn[n - 2].s, "tabulated: last segment must have positive length");
    double left = -first_slope(k);
    require(left > 0 && left < 1, "tabulated: first segment log-slope must lie in (-1,0)");
    if (k.tail == TailClass::Power)
        require(last_slope(k) < 0, "tabulated: power tail needs a decreasing last segment");
    if (k.tail == TailClass::Exponential)
        require(k.tail_rate > 0, "tabulated: exponential tail needs tail_rate > 0");
    if (truncated_tail(k))
        require(n >= 3, "tabulated: truncated tail needs at least three knots");
}

double w_tab(const TabulatedKernel& t, double s) {
    const auto& kn = t.knots;
    const std::size_t n = kn.size();
    if (s < kn[0].s) return kn[0].w * std::pow(s / kn[0].s, first_slope(t));
    // last knot with s_k <= s (right-continuity picks the lower value at an atom)
    auto it = std::upper_bound(kn.begin(), kn.end(), s, [](double v, const Knot& k) { return v < k.s; });
    std::size_t k = static_cast<std::size_t>(it - kn.begin()) - 1;
    if (k + 1 < n) return s == kn[k].s ? kn[k].w : seg_value(t, k, s);
    switch (t.tail) {
        case TailClass::Power:
            return kn[n - 1].w * std::pow(s / kn[n - 1].s, last_slope(t));
        case TailClass::Exponential:
            return kn[n - 1].w * std::exp(-t.tail_rate * (s - kn[n - 1].s));
        case TailClass::Truncated:
            return 0.0;
    }
    return 0.0;
}

double density_tab(const TabulatedKernel& t, double s) {
    const auto& kn = t.knots;
    const std::size_t n = kn.size();
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (kn[i].s == kn[i + 1].s && kn[i].s == s) throw AtomHere(s, kn[i].w - kn[i + 1].w);
    if (s < kn[0].s) return -first_slope(t) * w_tab(t, s) / s;
    auto it = std::upper_bound(kn.begin(), kn.end(), s, [](double v, const Knot& k) { return v < k.s; });
    std::size_t k = static_cast<std::size_t>(it - kn.begin()) - 1;
    if (k + 1 < n) return seg_density(t, k, s);
    switch (t.tail) {
        case TailClass::Power:
            return -last_slope(t) * w_tab(t, s) / s;
        case TailClass::Exponential:
            return t.tail_rate * w_tab(t, s);
        case TailClass::Truncated:
            return 0.0;
    }
    return 0.0;
}

double inverse_tab(const TabulatedKernel& t, double y) {
    const auto& kn = t.knots;
    const std::size_t n = kn.size();
    if (y >= kn[0].w) return kn[0].s * std::pow(y / kn[0].w, 1.0 / first_slope(t));
    std::size_t k = 1;
    while (k < n && kn[k].w > y) ++k;
    if (k < n) {
        const Knot& a = kn[k - 1];
        const Knot& b = kn[k];
        if (a.s == b.s) return b.s;
        if (truncated_tail(t) && k + 1 == n) return b.s - (b.s - a.s) * y / a.w;
        return a.s * std::exp(std::log(y / a.w) / seg_slope(a, b));
    }
    switch (t.tail) {
        case TailClass::Power:
            return kn[n - 1].s * std::pow(y / kn[n - 1].w, 1.0 / last_slope(t));
        case TailClass::Exponential:
            return kn[n - 1].s + std::log(kn[n - 1].w / y) / t.tail_rate;
        case TailClass::Truncated:
            return kn[n - 1].s;
    }
    return kn[n - 1].s;
}

// integral_0^b u^k w(u) du, split at kernel breakpoints
double moment_of_w(const Kernel& kernel, int k, double b) {
    std::vector<double> pts{0.0};
    for (double bp : kernel.breakpoints())
        if (bp < b) pts.push_back(bp);
    pts.push_back(b);
    auto f = [&](double u) { return std::pow(u, k) * kernel.w(u); };
    return integrate_panels(f, pts, 1e-12).value;
}

}  // namespace

Kernel::Kernel(Variant v) : spec_(std::move(v)) {
    std::visit([](const auto& k) { validate(k); }, spec_);
}

std::string Kernel::kind() const {
    return std::visit(overloaded{
                          [](const PowerKernel&) { return std::string("power"); },
                          [](const TruncatedKernel&) { return std::string("truncated"); },
                          [](const SubexpKernel&) { return std::string("subexp"); },
                          [](const DistributedKernel&) { return std::string("distributed"); },
                          [](const TabulatedKernel&) { return std::string("tabulated"); },
                      },
                      spec_);
}

double Kernel::w(double s) const {
    if (!(s > 0)) throw std::domain_error("w: argument must be positive");
    return std::visit(
        overloaded{
            [&](const PowerKernel& k) { return k.scale * std::pow(s, -k.beta); },
            [&](const TruncatedKernel& k) {
                return s >= k.delta ? 0.0 : k.scale * (std::pow(s, -k.beta) - std::pow(k.delta, -k.beta));
            },
            [&](const SubexpKernel& k) {
                return s <= 1.0 ? k.c0 * std::exp(-k.theta) * std::pow(s, -k.small_beta)
                                : k.c0 * std::exp(-k.theta * std::pow(s, k.beta));
            },
            [&](const DistributedKernel& k) {
                double sum = 0.0;
                for (const auto& term : k.weights)
                    sum += term.kappa * std::pow(s, -term.beta) / std::tgamma(1.0 - term.beta);
                return sum;
            },
            [&](const TabulatedKernel& k) { return w_tab(k, s); },
        },
        spec_);
}

double Kernel::levy_density(double s) const {
    if (!(s > 0)) throw std::domain_error("levy_density: argument must be positive");
    return std::visit(
        overloaded{
            [&](const PowerKernel& k) { return k.scale * k.beta * std::pow(s, -k.beta - 1.0); },
            [&](const TruncatedKernel& k) {
                return s >= k.delta ? 0.0 : k.scale * k.beta * std::pow(s, -k.beta - 1.0);
            },
            [&](const SubexpKernel& k) {
                if (s < 1.0) return k.c0 * std::exp(-k.theta) * k.small_beta * std::pow(s, -k.small_beta - 1.0);
                return k.c0 * k.theta * k.beta * std::pow(s, k.beta - 1.0) *
                       std::exp(-k.theta * std::pow(s, k.beta));
            },
            [&](const DistributedKernel& k) {
                double sum = 0.0;
                for (const auto& term : k.weights)
                    sum += term.kappa * term.beta * std::pow(s, -term.beta - 1.0) / std::tgamma(1.0 - term.beta);
                return sum;
            },
            [&](const TabulatedKernel& k) { return density_tab(k, s); },
        },
        spec_);
}

std::vector<Atom> Kernel::atoms() const {
    std::vector<Atom> out;
    if (const auto* t = std::get_if<TabulatedKernel>(&spec_)) {
        for (std::size_t i = 0; i + 1 < t->knots.size(); ++i)
            if (t->knots[i].s == t->knots[i + 1].s)
                out.push_back({t->knots[i].s, t->knots[i].w - t->knots[i + 1].w});
    }
    return out;
}

double Kernel::inverse_w(double y) const {
    if (!(y > 0) || !std::isfinite(y)) {
        std::ostringstream os;
        os << "inverse_w: level " << y << " outside (0, inf)";
        throw std::range_error(os.str());
    }
    return std::visit(
        overloaded{
            [&](const PowerKernel& k) { return std::pow(y / k.scale, -1.0 / k.beta); },
            [&](const TruncatedKernel& k) {
                return std::pow(y / k.scale + std::pow(k.delta, -k.beta), -1.0 / k.beta);
            },
            [&](const SubexpKernel& k) {
                double c = k.c0 * std::exp(-k.theta);
                if (y >= c) return std::pow(y / c, -1.0 / k.small_beta);
                return std::pow(std::log(k.c0 / y) / k.theta, 1.0 / k.beta);
            },
            [&](const DistributedKernel&) {
                double lo = 1.0, hi = 1.0;
                while (w(lo) <= y && lo > 1e-300) lo *= 0.5;
                while (w(hi) > y && hi < 1e300) hi *= 2.0;
                return bisect_geometric([&](double s) { return w(s) <= y; }, lo, hi, 1e-15);
            },
            [&](const TabulatedKernel& k) { return inverse_tab(k, y); },
        },
        spec_);
}

std::vector<double> Kernel::breakpoints() const {
    return std::visit(overloaded{
                          [](const PowerKernel&) { return std::vector<double>{}; },
                          [](const TruncatedKernel& k) { return std::vector<double>{k.delta}; },
                          [](const SubexpKernel&) { return std::vector<double>{1.0}; },
                          [](const DistributedKernel&) { return std::vector<double>{}; },
                          [](const TabulatedKernel& k) {
                              std::vector<double> out;
                              for (const auto& kn : k.knots)
                                  if (out.empty() || out.back() != kn.s) out.push_back(kn.s);
                              return out;
                          },
                      },
                      spec_);
}

double Kernel::support_end() const {
    if (const auto* k = std::get_if<TruncatedKernel>(&spec_)) return k->delta;
    if (const auto* t = std::get_if<TabulatedKernel>(&spec_); t && truncated_tail(*t))
        return t->knots.back().s;
    return kInf;
}

double Kernel::small_jump_mean(double eps) const {
    if (!(eps > 0)) return 0.0;
    auto power_part = [](double scale, double beta, double e) {
        return scale * std::pow(e, 1.0 - beta) * beta / (1.0 - beta);
    };
    if (const auto* k = std::get_if<PowerKernel>(&spec_)) return power_part(k->scale, k->beta, eps);
    if (const auto* k = std::get_if<TruncatedKernel>(&spec_))
        return power_part(k->scale, k->beta, std::min(eps, k->delta));
    if (const auto* k = std::get_if<DistributedKernel>(&spec_)) {
        double sum = 0.0;
        for (const auto& term : k->weights)
            sum += power_part(term.kappa / std::tgamma(1.0 - term.beta), term.beta, eps);
        return sum;
    }
    if (const auto* k = std::get_if<SubexpKernel>(&spec_); k && eps <= 1.0)
        return power_part(k->c0 * std::exp(-k->theta), k->small_beta, eps);
    return moment_of_w(*this, 0, eps) - eps * w(eps);
}

double Kernel::small_jump_second_moment(double eps) const {
    if (!(eps > 0)) return 0.0;
    if (const auto* k = std::get_if<PowerKernel>(&spec_))
        return k->scale * std::pow(eps, 2.0 - k->beta) * k->beta / (2.0 - k->beta);
    return 2.0 * moment_of_w(*this, 1, eps) - eps * eps * w(eps);
}

double Kernel::ker_integral() const {
    if (const auto* k = std::get_if<PowerKernel>(&spec_)) return k->scale / (1.0 - k->beta);
    return moment_of_w(*this, 0, 1.0);
}

Kernel make_caputo(double beta) { return Kernel(PowerKernel{beta, 1.0 / std::tgamma(1.0 - beta)}); }

std::vector<std::pair<std::string, Kernel>> builtin_kernels() {
    std::vector<std::pair<std::string, Kernel>> out;
    out.emplace_back("power", make_caputo(0.5));
    out.emplace_back("truncated", Kernel(TruncatedKernel{0.5, 1.0, 1.0 / std::tgamma(0.5)}));
    out.emplace_back("subexp", Kernel(SubexpKernel{0.5, 1.0, 1.0, 0.5}));
    out.emplace_back("distributed", Kernel(DistributedKernel{{{0.3, 0.5}, {0.7, 0.5}}}));
    TabulatedKernel tab;
    for (int i = -12; i <= 12; ++i) {
        double s = std::pow(10.0, i / 3.0);
        tab.knots.push_back({s, std::pow(s, -0.4) * std::pow(1.0 + s, -0.3) / std::tgamma(0.6)});
    }
    out.emplace_back("tabulated", Kernel(std::move(tab)));
    return out;
}

// ---------------------------------------------------------------------------
// condition checks

namespace {

struct ScalingScan {
    double exponent = 0.0;
    std::vector<double> grid;
    std::vector<double> constant;  // running constant c(t) for horizon t = grid[i]
};

// Lower scaling w(R)/w(r) >= c (R/r)^-delta for r <= R on the grid.
// c(t) = exp(min_{R<=t} [g(R) - max_{r<=R} g(r)]), g = log w + delta log s.
ScalingScan scaling_scan(const Kernel& kernel, const std::vector<double>& grid, double delta) {
    ScalingScan out;
    out.exponent = delta;
    out.grid = grid;
    double best = -kInf, worst = 0.0;
    for (double s : grid) {
        double g = std::log(kernel.w(s)) + delta * std::log(s);
        best = std::max(best, g);
        worst = std::min(worst, g - best);
        out.constant.push_back(std::exp(worst));
    }
    return out;
}

double median_slope(const Kernel& kernel, double lo, double hi) {
    auto pts = per_decade_grid(lo, hi, 16);
    std::vector<double> slopes;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        slopes.push_back(-std::log(kernel.w(pts[i + 1]) / kernel.w(pts[i])) / std::log(pts[i + 1] / pts[i]));
    std::nth_element(slopes.begin(), slopes.begin() + slopes.size() / 2, slopes.end());
    return slopes[slopes.size() / 2];
}

std::optional<ScalingWitness> small_scale(const Kernel& kernel, double lo, double hi, int per_decade,
                                          double min_c, std::vector<ConditionEvidence>& ev,
                                          const std::string& name) {
    if (!(hi > lo)) return std::nullopt;
    double delta = median_slope(kernel, lo, std::min(10.0 * lo, hi));
    auto grid = per_decade_grid(lo, hi, per_decade);
    auto scan = scaling_scan(kernel, grid, delta);
    std::size_t last = 0;
    bool any = false;
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (scan.constant[i] >= min_c) { last = i; any = true; }
    ConditionEvidence e{name, grid.size() * (grid.size() + 1) / 2, any ? scan.constant[last] : 0.0, any};
    ev.push_back(e);
    if (!any || last == 0) return std::nullopt;
    return ScalingWitness{grid[last], delta, scan.constant[last], true};
}

}  // namespace

ConditionReport check_conditions(const Kernel& kernel, const ConditionOptions& opt) {
    ConditionReport rep;
    const double end = kernel.support_end();
    const double top = std::isfinite(end) ? std::min(opt.hi, end * (1.0 - 1e-9)) : opt.hi;

    if (const auto* t = std::get_if<TabulatedKernel>(&kernel.spec()); t && t->knots.size() < 4)
        rep.diagnostics.push_back("insufficient resolution: fewer than four knots in the table");

    // Ker: positive, non-increasing, infinite mass at 0, integrable near 0, vanishing at infinity.
    {
        auto grid = per_decade_grid(opt.lo, top, opt.per_decade);
        bool mono = true, positive = true;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            double v = kernel.w(grid[i]);
            // exponential tails may underflow to 0 far out; only the scales
            // where w is representable are tested
            if (!(v >= 0) || !std::isfinite(v) || (v == 0 && grid[i] <= 1.0)) positive = false;
            if (i > 0 && v > kernel.w(grid[i - 1]) * (1.0 + 1e-12)) mono = false;
        }
        bool blowup = kernel.w(1e-30) > kernel.w(1e-15) && kernel.w(1e-15) > kernel.w(opt.lo);
        bool integrable = true;
        try {
            integrable = std::isfinite(kernel.ker_integral());
        } catch (const QuadratureError&) {
            integrable = false;
        }
        bool vanish = std::isfinite(end) || kernel.w(1e12) < 1e-3 * kernel.w(1.0);
        rep.ker_ok = mono && positive && blowup && integrable && vanish;
        rep.evidence.push_back({"ker", grid.size(), 1.0, rep.ker_ok});
        if (!mono) rep.diagnostics.push_back("w is not non-increasing on the grid");
        if (!positive) rep.diagnostics.push_back("w is not positive inside its support");
        if (!blowup) rep.diagnostics.push_back("w does not blow up at 0 (finite Levy measure)");
        if (!integrable) rep.diagnostics.push_back("integral of w over (0,1) did not converge");
        if (!vanish) rep.diagnostics.push_back("w does not vanish at infinity");
    }

    // Trunc: finite support, bi-Lipschitz near the end, lower scaling on (0, t_f/2].
    if (std::isfinite(end)) {
        TruncWitness tw;
        tw.t_f = end;
        auto pts = linear_grid(end / 4.0, end, static_cast<std::size_t>(opt.trunc_points));
        tw.slope_min = kInf;
        tw.slope_max = 0.0;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            double slope = std::abs(kernel.w(pts[i + 1]) - kernel.w(pts[i])) / (pts[i + 1] - pts[i]);
            tw.slope_min = std::min(tw.slope_min, slope);
            tw.slope_max = std::max(tw.slope_max, slope);
        }
        tw.K = std::max({1.0, tw.slope_max, 1.0 / tw.slope_min});
        bool zero_at_end = kernel.w(end) == 0.0;
        auto s3 = small_scale(kernel, opt.lo, end / 2.0, opt.per_decade, 0.0, rep.evidence, "trunc_scaling");
        bool lip = std::isfinite(tw.K) && kernel.atoms().empty();
        rep.evidence.push_back({"trunc_lipschitz", pts.size() - 1, 1.0 / tw.K, lip && zero_at_end});
        if (lip && zero_at_end && s3 && s3->horizon >= end / 2.0 * (1.0 - 1e-9)) {
            tw.delta3 = s3->exponent;
            tw.delta3_constant = s3->constant;
            rep.trunc = tw;
        } else {
            rep.diagnostics.push_back("finite support but the truncation condition was not witnessed");
        }
    }

    // S.Poly
    if (rep.trunc) {
        // truncation gives the small-scale condition up to t_f/2
        rep.spoly = ScalingWitness{rep.trunc->t_f / 2.0, rep.trunc->delta3, rep.trunc->delta3_constant, false};
        rep.evidence.push_back({"spoly", 0, rep.trunc->delta3_constant, true});
    } else {
        rep.spoly = small_scale(kernel, opt.lo, top, opt.per_decade, opt.min_constant, rep.evidence, "spoly");
    }

    // L.Poly: needs unbounded support and a stable log-slope at large scale.
    if (!std::isfinite(end) && opt.hi > 100.0) {
        double last = median_slope(kernel, opt.hi / 10.0, opt.hi);
        double prev = median_slope(kernel, opt.hi / 100.0, opt.hi / 10.0);
        auto grid = per_decade_grid(1.0, opt.hi, opt.per_decade);
        bool finite = true;
        for (double s : grid) finite = finite && kernel.w(s) > 0;
        if (finite && std::isfinite(last) && std::isfinite(prev)) {
            auto scan = scaling_scan(kernel, grid, last);
            double c = scan.constant.back();
            bool stable = std::abs(last - prev) <= 0.05;
            bool ok = stable && c >= opt.min_constant;
            rep.evidence.push_back({"lpoly", grid.size() * (grid.size() + 1) / 2, c, ok});
            if (ok) rep.lpoly = ScalingWitness{1.0, last, c, true};
        } else {
            rep.evidence.push_back({"lpoly", grid.size(), 0.0, false});
        }
    }

    // Sub
    auto sup_log = [&](double beta, double theta) {
        double best = -kInf;
        for (double s : per_decade_grid(1.0, std::max(1.0 + 1e-9, std::min(opt.hi, top)), opt.per_decade)) {
            double v = kernel.w(s);
            if (v > 0) best = std::max(best, std::log(v) + theta * std::pow(s, beta));
        }
        return best;
    };
    if (const auto* k = std::get_if<SubexpKernel>(&kernel.spec())) {
        double c = std::exp(sup_log(k->beta, k->theta));
        bool ok = c <= k->c0 * (1.0 + 1e-9);
        rep.evidence.push_back({"sub", 0, c, ok});
        if (ok) rep.sub = SubWitness{k->beta, k->theta, k->c0, false};
    } else if (const auto* t = std::get_if<TabulatedKernel>(&kernel.spec());
               t && t->tail == TailClass::Exponential) {
        double c = std::exp(sup_log(1.0, t->tail_rate));
        rep.evidence.push_back({"sub", 0, c, std::isfinite(c)});
        if (std::isfinite(c)) rep.sub = SubWitness{1.0, t->tail_rate, c, false};
    } else if (rep.trunc) {
        double c = end > 1.0 ? std::exp(sup_log(1.0, 1.0)) : 0.0;
        rep.sub = SubWitness{1.0, 1.0, std::max(c, 0.0), true};
        rep.evidence.push_back({"sub", 0, c, true});
    }
    return rep;
}

}  // namespace subtail
