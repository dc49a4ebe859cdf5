#include "subtail/fundamental.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

#include "subtail/bernstein.hpp"

namespace subtail {
namespace {

using boost::math::quadrature::gauss;

constexpr double kHalfDecade = 1.151292546497022842;  // log(10) / 2

struct PanelSum {
    double value = 0.0;
    double error = 0.0;
};

// integral over [a, b] of f, GL-20 with a GL-10 comparison for the error
template <class F>
PanelSum gl_panel(const F& f, double a, double b) {
    double hi = gauss<double, 20>::integrate(f, a, b);
    double lo = gauss<double, 10>::integrate(f, a, b);
    return {hi, std::abs(hi - lo)};
}

}  // namespace

HalfStableDensity::HalfStableDensity(double t, double kappa) : TimeChangeDensity(t), kappa_(kappa) {
    if (!(t > 0)) throw std::domain_error("HalfStableDensity: t must be positive");
    if (!(kappa > 0)) throw std::domain_error("HalfStableDensity: kappa must be positive");
}

double HalfStableDensity::pdf(double r) const {
    if (r < 0) return 0.0;
    double z = kappa_ * r;
    return kappa_ * std::exp(-z * z / (4.0 * t_)) / std::sqrt(kPi * t_);
}

double HalfStableDensity::cdf(double r) const {
    if (r <= 0) return 0.0;
    return std::erf(kappa_ * r / (2.0 * std::sqrt(t_)));
}

EmpiricalDensity::EmpiricalDensity(double t, std::vector<double> samples, std::size_t n_knots)
    : TimeChangeDensity(t) {
    if (samples.size() < 4 * n_knots) throw std::invalid_argument("EmpiricalDensity: too few samples for the knot count");
    if (n_knots < 4) throw std::invalid_argument("EmpiricalDensity: need at least 4 knots");
    std::sort(samples.begin(), samples.end());
    if (!(samples.front() > 0)) throw std::invalid_argument("EmpiricalDensity: samples must be positive");
    const double n = static_cast<double>(samples.size());
    median_ = samples[samples.size() / 2];

    // knots at equally spaced quantile levels; ties collapse to one knot
    for (std::size_t i = 0; i <= n_knots; ++i) {
        double level = static_cast<double>(i) / static_cast<double>(n_knots);
        std::size_t idx = std::min(samples.size() - 1, static_cast<std::size_t>(level * (n - 1.0)));
        double x = std::log(samples[idx]);
        double F = i == 0 ? 0.0 : (i == n_knots ? 1.0 : level);
        if (!log_r_.empty() && x <= log_r_.back()) {
            F_.back() = F;
            continue;
        }
        log_r_.push_back(x);
        F_.push_back(F);
    }
    const std::size_t m = log_r_.size();
    if (m < 3) throw std::invalid_argument("EmpiricalDensity: samples are degenerate");
    bandwidth_ = (log_r_.back() - log_r_.front()) / static_cast<double>(m - 1);

    // Fritsch-Carlson slopes keep the interpolant monotone
    std::vector<double> secant(m - 1);
    for (std::size_t i = 0; i + 1 < m; ++i) secant[i] = (F_[i + 1] - F_[i]) / (log_r_[i + 1] - log_r_[i]);
    slope_.assign(m, 0.0);
    slope_[0] = secant[0];
    slope_[m - 1] = secant[m - 2];
    for (std::size_t i = 1; i + 1 < m; ++i)
        slope_[i] = secant[i - 1] * secant[i] <= 0 ? 0.0 : 0.5 * (secant[i - 1] + secant[i]);
    for (std::size_t i = 0; i + 1 < m; ++i) {
        if (secant[i] == 0) {
            slope_[i] = slope_[i + 1] = 0.0;
            continue;
        }
        double a = slope_[i] / secant[i], b = slope_[i + 1] / secant[i];
        double h = a * a + b * b;
        if (h > 9.0) {
            double tau = 3.0 / std::sqrt(h);
            slope_[i] = tau * a * secant[i];
            slope_[i + 1] = tau * b * secant[i];
        }
    }
}

double EmpiricalDensity::cdf(double r) const {
    if (r <= 0) return 0.0;
    double x = std::log(r);
    if (x <= log_r_.front()) return 0.0;
    if (x >= log_r_.back()) return 1.0;
    std::size_t i = std::upper_bound(log_r_.begin(), log_r_.end(), x) - log_r_.begin() - 1;
    double h = log_r_[i + 1] - log_r_[i];
    double s = (x - log_r_[i]) / h;
    double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    return h00 * F_[i] + h10 * h * slope_[i] + h01 * F_[i + 1] + h11 * h * slope_[i + 1];
}

double EmpiricalDensity::pdf(double r) const {
    if (r <= 0) return 0.0;
    double x = std::log(r);
    if (x <= log_r_.front() || x >= log_r_.back()) return 0.0;
    std::size_t i = std::upper_bound(log_r_.begin(), log_r_.end(), x) - log_r_.begin() - 1;
    double h = log_r_[i + 1] - log_r_[i];
    double s = (x - log_r_[i]) / h;
    double d00 = 6 * s * s - 6 * s, d10 = 3 * s * s - 4 * s + 1;
    double d01 = -d00, d11 = 3 * s * s - 2 * s;
    double dF = (d00 * F_[i] + d01 * F_[i + 1]) / h + d10 * slope_[i] + d11 * slope_[i + 1];
    return std::max(0.0, dF) / r;
}

std::unique_ptr<TimeChangeDensity> make_time_change_density(const Kernel& kernel, double t, const SimConfig& cfg,
                                                            const BernsteinTable& table) {
    if (const auto* p = std::get_if<PowerKernel>(&kernel.spec()); p && p->beta == 0.5)
        return std::make_unique<HalfStableDensity>(t, p->scale * std::sqrt(kPi));
    double levels[] = {t};
    double phis[] = {table.phi(1.0 / t)};
    auto ens = sample_E_t(kernel, cfg, levels, phis);
    return std::make_unique<EmpiricalDensity>(t, ens.column(0));
}

QuadValue p_quadrature(const std::function<double(double)>& q_of_r, const TimeChangeDensity& density,
                       std::vector<double> breakpoints, double rel_tol) {
    if (!density.closed_form() && rel_tol < 1e-2) {
        std::ostringstream os;
        os << "p_quadrature: empirical density (bandwidth " << density.bandwidth()
           << " in log r) cannot meet a relative target below 1e-2";
        throw std::invalid_argument(os.str());
    }
    const double scale = density.scale();
    const double top = std::min(density.support_end(), scale * std::pow(10.0, 1.5));
    const double u_top = std::log(top);
    std::vector<double> knots;
    for (double u = std::log(scale) - 60.0 * kHalfDecade; u < u_top; u += kHalfDecade) knots.push_back(u);
    knots.push_back(u_top);
    for (double b : breakpoints)
        if (b > 0 && std::log(b) > knots.front() && std::log(b) < u_top) knots.push_back(std::log(b));
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

    auto h = [&](double u) {
        double r = std::exp(u);
        double g = density.pdf(r);
        return g == 0.0 ? 0.0 : q_of_r(r) * g * r;
    };
    QuadValue out;
    double first_decade = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        PanelSum s = gl_panel(h, knots[i], knots[i + 1]);
        out.value += s.value;
        out.error += s.error;
        if (knots[i + 1] <= knots.front() + 2.0 * kHalfDecade) first_decade += s.value;
    }
    if (!std::isfinite(out.value)) {
        out.note = "integral is not finite";
    } else if (first_decade > 1e-6 * std::abs(out.value)) {
        out.note = "slow decay as r -> 0; the truncated lower range carries weight";
    } else if (out.error > rel_tol * std::abs(out.value)) {
        std::ostringstream os;
        os << "error estimate " << out.error << " above the relative target " << rel_tol;
        out.note = os.str();
    }
    return out;
}

QuadValue p_quadrature(const HKModel& model, const TimeChangeDensity& density, double x, double y, double rel_tol) {
    const GeometryProbe probe = geometry_probe(model.geometry(), x, y);
    return p_quadrature([&](double r) { return model.q(r, probe); }, density, model.time_breakpoints(probe), rel_tol);
}

McValue p_mc(const std::function<double(double)>& q_of_r, const PathEnsemble& ens, std::size_t level) {
    if (ens.kind != PathEnsemble::Kind::InverseAt) throw std::invalid_argument("p_mc: needs an E_t ensemble");
    if (level >= ens.levels.size()) throw std::out_of_range("p_mc: level index out of range");
    McValue out;
    out.n_paths = ens.n_paths;
    out.censored = ens.censored_count(level);
    std::vector<double> vals(ens.n_paths);
    for (std::size_t p = 0; p < ens.n_paths; ++p) vals[p] = q_of_r(ens.value(p, level));
    const double n = static_cast<double>(ens.n_paths);
    double mean = std::accumulate(vals.begin(), vals.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : vals) ss += (v - mean) * (v - mean);
    out.value = mean;
    out.se = n > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    if (mean > 0 && out.se > 0.1 * mean) {
        // share of the sum of squares carried by the largest 1% of paths
        std::vector<double> dev(vals.size());
        for (std::size_t i = 0; i < vals.size(); ++i) dev[i] = (vals[i] - mean) * (vals[i] - mean);
        std::size_t top = std::max<std::size_t>(1, vals.size() / 100);
        std::nth_element(dev.begin(), dev.begin() + top, dev.end(), std::greater<>());
        double top_share = std::accumulate(dev.begin(), dev.begin() + top, 0.0) / ss;
        std::ostringstream os;
        os << "increase paths: relative se " << out.se / mean << "; top 1% of paths carry " << top_share
           << " of the variance; " << out.censored << " censored";
        out.diagnostic = os.str();
    }
    return out;
}

McValue p_mc(const HKModel& model, const PathEnsemble& ens, std::size_t level, double x, double y) {
    const GeometryProbe probe = geometry_probe(model.geometry(), x, y);
    return p_mc([&](double r) { return model.q(r, probe); }, ens, level);
}

McValue p_mc(const HKModel& model, const Kernel& kernel, const BernsteinTable& table, const SimConfig& cfg, double t,
             double x, double y) {
    double levels[] = {t};
    double phis[] = {table.phi(1.0 / t)};
    auto ens = sample_E_t(kernel, cfg, levels, phis);
    return p_mc(model, ens, 0, x, y);
}

namespace {

// One side of a segment: distances s in (0, h] from an anchor, walked in
// dyadic panels toward the anchor (inward) or away from it (outward, h = scale).
struct Ray {
    double anchor;
    double direction;  // +1 or -1
    double h;
    bool outward;
};

// Rays covering the domain minus the point x, with special points at x,
// the boundary and the interval midpoint.
std::vector<Ray> rays_for(const Geometry& g, double x) {
    std::vector<double> pts;
    double lo, hi;
    switch (g.kind()) {
        case GeometryKind::Interval: lo = 0; hi = g.length(); pts = {0.0, g.length() / 2.0, g.length()}; break;
        case GeometryKind::HalfLine: lo = 0; hi = kInf; pts = {0.0}; break;
        case GeometryKind::Exterior:
            if (x > 0) { lo = 1.0; hi = kInf; pts = {1.0}; }
            else { lo = -kInf; hi = -1.0; pts = {-1.0}; }
            break;
        default: lo = -kInf; hi = kInf; break;
    }
    pts.push_back(x);
    pts.erase(std::remove_if(pts.begin(), pts.end(), [&](double p) { return p < lo || p > hi; }), pts.end());
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    std::vector<Ray> rays;
    if (!std::isfinite(lo)) rays.push_back({pts.front(), -1.0, 1.0, true});
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        double a = pts[i], b = pts[i + 1], half = 0.5 * (b - a);
        rays.push_back({a, +1.0, half, false});
        rays.push_back({b, -1.0, half, false});
    }
    if (!std::isfinite(hi)) rays.push_back({pts.back(), +1.0, 1.0, true});
    // an unbounded side also needs the unit stretch next to the anchor
    std::vector<Ray> extra;
    for (const auto& r : rays)
        if (r.outward) extra.push_back({r.anchor, r.direction, r.h, false});
    rays.insert(rays.end(), extra.begin(), extra.end());
    return rays;
}

// k-th panel of a ray, as an interval of y
std::pair<double, double> ray_panel(const Ray& ray, int k) {
    double s0, s1;
    if (ray.outward) {
        s0 = ray.h * std::ldexp(1.0, k);
        s1 = 2.0 * s0;
    } else {
        s1 = ray.h * std::ldexp(1.0, -k);
        s0 = 0.5 * s1;
    }
    double y0 = ray.anchor + ray.direction * s0, y1 = ray.anchor + ray.direction * s1;
    return {std::min(y0, y1), std::max(y0, y1)};
}

}  // namespace

SolutionValue solve_u(const HKModel& model, const TimeChangeDensity& density, double x,
                      const std::function<double(double)>& f, const SolveOptions& opt) {
    const Geometry& g = model.geometry();
    if (!g.contains(x)) throw std::domain_error("solve_u: x is outside the domain");
    SolutionValue out;
    const double pq_tol = density.closed_form() ? 1e-8 : 1e-2;
    auto integrand = [&](double y) {
        ++out.evaluations;
        double fy = f(y);
        if (fy == 0.0) return 0.0;
        return fy * p_quadrature(model, density, x, y, pq_tol).value;
    };
    std::vector<std::string> notes;
    for (const auto& ray : rays_for(g, x)) {
        double ray_total = 0.0;
        int quiet = 0;
        bool done = false;
        for (int k = 0; k <= opt.max_halvings; ++k) {
            auto [a, b] = ray_panel(ray, k);
            PanelSum s = gl_panel(integrand, a, b);
            ray_total += s.value;
            out.error += s.error;
            quiet = std::abs(s.value) <= opt.rel_tol * std::abs(ray_total) ? quiet + 1 : 0;
            if (k >= 4 && quiet >= 3) {
                done = true;
                break;
            }
        }
        if (!done) {
            std::ostringstream os;
            os << "panels toward " << ray.anchor << " did not settle after " << opt.max_halvings << " halvings";
            notes.push_back(os.str());
        }
        out.value += ray_total;
    }
    for (const auto& n : notes) out.note += (out.note.empty() ? "" : "; ") + n;
    return out;
}

SolutionValue solve_u_mc(const HKModel& model, const PathEnsemble& ens, std::size_t level, double x,
                         const std::function<double(double)>& f, int depth) {
    const Geometry& g = model.geometry();
    if (!g.contains(x)) throw std::domain_error("solve_u_mc: x is outside the domain");
    if (level >= ens.levels.size()) throw std::out_of_range("solve_u_mc: level index out of range");
    // fixed Gauss-Legendre rule over the dyadic panels
    std::vector<GeometryProbe> probes;
    std::vector<double> weights;
    const auto& abs = gauss<double, 10>::abscissa();
    const auto& wts = gauss<double, 10>::weights();
    auto add_node = [&](double y, double w) {
        double fy = f(y);
        if (fy != 0.0) {
            probes.push_back(geometry_probe(g, x, y));
            weights.push_back(w * fy);
        }
    };
    for (const auto& ray : rays_for(g, x)) {
        for (int k = 0; k <= depth; ++k) {
            auto [a, b] = ray_panel(ray, k);
            double mid = 0.5 * (a + b), half = 0.5 * (b - a);
            for (std::size_t i = 0; i < abs.size(); ++i) {
                if (abs[i] == 0.0) {
                    add_node(mid, half * wts[i]);
                } else {
                    add_node(mid - half * abs[i], half * wts[i]);
                    add_node(mid + half * abs[i], half * wts[i]);
                }
            }
        }
    }
    const std::size_t n = ens.n_paths;
    std::vector<double> per_path(n, 0.0);
    for (std::size_t p = 0; p < n; ++p) {
        double r = ens.value(p, level);
        double acc = 0.0;
        for (std::size_t i = 0; i < probes.size(); ++i) acc += weights[i] * model.q(r, probes[i]);
        per_path[p] = acc;
    }
    SolutionValue out;
    out.evaluations = probes.size() * n;
    double mean = std::accumulate(per_path.begin(), per_path.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : per_path) ss += (v - mean) * (v - mean);
    out.value = mean;
    out.error = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
    return out;
}

namespace {

// nu^{*k}((u, inf)) for a kernel supported on (0, t_f], u in ((k-1) t_f, k t_f)
double convolved_tail(const Kernel& kernel, double t_f, int k, double u) {
    if (k == 1) return kernel.w(u);
    double lo = std::max(0.0, u - (k - 1) * t_f);
    if (lo >= t_f * (1.0 - 1e-12)) return 0.0;
    auto f = [&](double s) { return kernel.levy_density(s) * convolved_tail(kernel, t_f, k - 1, u - s); };
    try {
        return integrate(f, lo, t_f, 1e-8).value;
    } catch (const QuadratureError& e) {
        // near-degenerate inner ranges give values far below the outer scale
        return e.value();
    }
}

}  // namespace

SmallTimeLaw small_time_law(const Kernel& kernel, double t) {
    if (!(t > 0)) throw std::domain_error("small_time_law: t must be positive");
    SmallTimeLaw law;
    const double t_f = kernel.support_end();
    if (!std::isfinite(t_f)) {
        law.n_jumps = 1;
        law.coefficient = kernel.w(t);
        return law;
    }
    if (!kernel.atoms().empty()) throw std::invalid_argument("small_time_law: atoms in the Levy measure are not supported");
    law.n_jumps = static_cast<int>(std::floor(t / t_f)) + 1;
    if (law.n_jumps > 5) throw std::domain_error("small_time_law: more than 5 jumps needed; nested quadrature too deep");
    law.coefficient = convolved_tail(kernel, t_f, law.n_jumps, t) / std::tgamma(law.n_jumps + 1.0);
    return law;
}

DiagonalProbe diagonal_probe(const Kernel& kernel, const HKModel& model, double t, double x, double r0, int max_panels,
                             double stop_fraction) {
    DiagonalProbe out;
    out.law = small_time_law(kernel, t);
    const GeometryProbe probe = geometry_probe(model.geometry(), x, x);
    const int n = out.law.n_jumps;
    const double A = out.law.coefficient;
    auto h = [&](double u) {
        double r = std::exp(u);
        return model.q(r, probe) * n * A * std::pow(r, n - 1) * r;
    };
    for (int k = 0; k < max_panels; ++k) {
        double b = std::log(r0) - k * std::log(2.0);
        double s = gl_panel(h, b - std::log(2.0), b).value;
        out.panel_sums.push_back(s);
        out.total += s;
        if (k >= 1 && s < stop_fraction * out.total) {
            out.converged = true;
            break;
        }
    }
    if (!out.converged) {
        // contributions that stop shrinking make the partial sums grow without bound
        const auto& c = out.panel_sums;
        int flat = 0;
        for (std::size_t i = c.size() - 8; i < c.size(); ++i)
            if (c[i] >= 0.999 * c[i - 1]) ++flat;
        out.divergent = flat == 8;
    }
    std::ostringstream os;
    os << "n = " << n << " jumps, A = " << A << ": ";
    if (out.converged) os << "converged after " << out.panel_sums.size() << " panels";
    else if (out.divergent) os << "divergent (panel sums do not decay)";
    else os << "undetermined after " << max_panels << " panels";
    out.verdict = os.str();
    return out;
}

}  // namespace subtail
