#include "subtail/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

namespace subtail {
namespace {

// Boost's error estimates are conservative; accept up to this multiple of
// the requested tolerance before declaring non-convergence.
constexpr double kSlack = 1e3;

void check_converged(const char* who, double value, double err, double l1, double rel_tol,
                     double a, double b) {
    if (!std::isfinite(value)) {
        std::ostringstream os;
        os << who << ": non-finite value on [" << a << ", " << b << "]";
        throw QuadratureError(os.str(), value, err);
    }
    double scale = std::max(std::abs(value), l1);
    if (err > kSlack * rel_tol * scale && err > 1e-300) {
        std::ostringstream os;
        os << who << ": error " << err << " exceeds target " << rel_tol << " x " << scale
           << " on [" << a << ", " << b << "]";
        throw QuadratureError(os.str(), value, err);
    }
}

boost::math::quadrature::tanh_sinh<double>& tanh_sinh_rule() {
    thread_local boost::math::quadrature::tanh_sinh<double> rule(15);
    return rule;
}

boost::math::quadrature::exp_sinh<double>& exp_sinh_rule() {
    thread_local boost::math::quadrature::exp_sinh<double> rule(15);
    return rule;
}

struct RawQuad {
    double value = 0.0, error = 0.0, l1 = 0.0;
};

RawQuad raw_tanh_sinh(const Fn& f, double a, double b, double rel_tol) {
    RawQuad q;
    if (!(a < b)) return q;
    // Work on [0,1]: Boost's error estimate degrades on very short intervals.
    // tc < 0 is the distance to 0, tc > 0 the distance to 1.
    const double width = b - a;
    auto unit = [&](double t, double tc) {
        double x = tc < 0 ? a + width * t : b - width * tc;
        return width * f(x);
    };
    q.value = tanh_sinh_rule().integrate(unit, 0.0, 1.0, rel_tol, &q.error, &q.l1);
    return q;
}

RawQuad raw_exp_sinh(const Fn& f, double a, double rel_tol) {
    RawQuad q;
    q.value = exp_sinh_rule().integrate(f, a, kInf, rel_tol, &q.error, &q.l1);
    return q;
}

}  // namespace

QuadResult integrate(const Fn& f, double a, double b, double rel_tol) {
    RawQuad q = raw_tanh_sinh(f, a, b, rel_tol);
    check_converged("tanh_sinh", q.value, q.error, q.l1, rel_tol, a, b);
    return {q.value, q.error};
}

QuadResult integrate_smooth(const Fn& f, double a, double b, double rel_tol) {
    if (!(a < b)) return {0.0, 0.0};
    double err = 0.0, l1 = 0.0;
    double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, rel_tol,
                                                                              &err, &l1);
    check_converged("gauss_kronrod", v, err, l1, rel_tol, a, b);
    return {v, err};
}

QuadResult integrate_to_infinity(const Fn& f, double a, double rel_tol) {
    RawQuad q = raw_exp_sinh(f, a, rel_tol);
    check_converged("exp_sinh", q.value, q.error, q.l1, rel_tol, a, kInf);
    return {q.value, q.error};
}

// Errors are judged against the whole integral, so a negligible panel with a
// loose estimate does not fail the sum.
QuadResult integrate_panels(const Fn& f, std::span<const double> points, double rel_tol) {
    RawQuad total;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        double a = points[i], b = points[i + 1];
        if (!(a < b)) continue;
        RawQuad part = std::isinf(b) ? raw_exp_sinh(f, a, rel_tol) : raw_tanh_sinh(f, a, b, rel_tol);
        total.value += part.value;
        total.error += part.error;
        total.l1 += part.l1;
    }
    if (points.size() >= 2)
        check_converged("panels", total.value, total.error, total.l1, rel_tol, points.front(), points.back());
    return {total.value, total.error};
}

double bisect_geometric(const std::function<bool(double)>& pred, double lo, double hi,
                        double rel_tol, int max_iter) {
    if (!(lo > 0.0 && hi > lo)) throw std::domain_error("bisect_geometric: need 0 < lo < hi");
    if (pred(lo)) return lo;
    if (!pred(hi)) throw RootError("bisect_geometric: predicate false on whole bracket", lo, hi, 0, 0);
    for (int i = 0; i < max_iter && hi / lo - 1.0 > rel_tol; ++i) {
        double mid = std::sqrt(lo * hi);
        if (pred(mid)) hi = mid; else lo = mid;
    }
    return hi;
}

double solve_increasing(const Fn& f, double target, double lo, double hi, double rel_tol,
                        int max_iter) {
    double flo = f(lo), fhi = f(hi);
    if (!(flo <= target && target <= fhi)) {
        std::ostringstream os;
        os << "solve_increasing: target " << target << " outside [" << flo << ", " << fhi << "]";
        throw RootError(os.str(), lo, hi, flo, fhi);
    }
    for (int i = 0; i < max_iter && hi / lo - 1.0 > rel_tol; ++i) {
        double mid = std::sqrt(lo * hi);
        if (f(mid) < target) lo = mid; else hi = mid;
    }
    return std::sqrt(lo * hi);
}

double solve_bracketed(const Fn& f, double lo, double hi, double rel_tol) {
    if (!(lo > 0.0 && hi > lo)) throw std::domain_error("solve_bracketed: need 0 < lo < hi");
    double a = std::log(lo), b = std::log(hi);
    auto g = [&](double u) { return f(std::exp(u)); };
    double fa = g(a), fb = g(b);
    if (fa == 0.0) return lo;
    if (fb == 0.0) return hi;
    if ((fa > 0) == (fb > 0)) {
        std::ostringstream os;
        os << "solve_bracketed: no sign change on [" << lo << ", " << hi << "]";
        throw RootError(os.str(), lo, hi, fa, fb);
    }
    std::uintmax_t iters = 200;
    auto done = [rel_tol](double x, double y) { return std::abs(y - x) <= rel_tol; };
    auto r = boost::math::tools::toms748_solve(g, a, b, fa, fb, done, iters);
    return std::exp(0.5 * (r.first + r.second));
}

MaxResult golden_maximize(const Fn& f, double guess, double rel_tol) {
    const double step = std::log(4.0);
    auto g = [&](double u) { return f(std::exp(u)); };
    double mid = std::log(guess);
    double fm = g(mid);
    double a = mid - step, b = mid + step;
    double fa = g(a), fb = g(b);
    for (int i = 0; i < 400 && (fa > fm || fb > fm); ++i) {
        if (fa > fm) {
            b = mid; fb = fm; mid = a; fm = fa; a -= step; fa = g(a);
        } else {
            a = mid; fa = fm; mid = b; fm = fb; b += step; fb = g(b);
        }
    }
    if (fa > fm || fb > fm) throw RootError("golden_maximize: bracket expansion failed", a, b, fa, fb);

    MaxResult out;
    // Unimodality scan: once values start decreasing they must not rise again.
    constexpr int kScan = 33;
    double prev = g(a);
    bool falling = false;
    for (int i = 1; i < kScan; ++i) {
        double v = g(a + (b - a) * i / (kScan - 1));
        double tol = 1e-12 * std::max(std::abs(v), std::abs(prev));
        if (v < prev - tol) falling = true;
        else if (falling && v > prev + tol) out.unimodal = false;
        prev = v;
    }

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = g(x1), f2 = g(x2);
    for (int i = 0; i < 400 && (b - a) > rel_tol; ++i) {
        if (f1 < f2) {
            a = x1; x1 = x2; f1 = f2; x2 = a + inv_phi * (b - a); f2 = g(x2);
        } else {
            b = x2; x2 = x1; f2 = f1; x1 = b - inv_phi * (b - a); f1 = g(x1);
        }
    }
    double u = f1 > f2 ? x1 : x2;
    out.argmax = std::exp(u);
    out.value = std::max(f1, f2);
    return out;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    if (n == 1) { out[0] = lo; return out; }
    double la = std::log(lo), lb = std::log(hi);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = std::exp(la + (lb - la) * static_cast<double>(i) / static_cast<double>(n - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

std::vector<double> per_decade_grid(double lo, double hi, int per_decade) {
    double decades = std::log10(hi / lo);
    auto n = static_cast<std::size_t>(std::ceil(decades * per_decade)) + 1;
    return log_grid(lo, hi, n);
}

std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    if (n == 1) { out[0] = lo; return out; }
    for (std::size_t i = 0; i < n; ++i)
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

double erf_inv(double x) { return boost::math::erf_inv(x); }

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw std::invalid_argument("least_squares: need >= 2 aligned points");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) { mx += x[i]; my += y[i]; }
    mx /= n; my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0) throw std::invalid_argument("least_squares: degenerate abscissae");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = y[i] - fit.intercept - fit.slope * x[i];
        ssr += r * r;
        fit.max_abs_residual = std::max(fit.max_abs_residual, std::abs(r));
    }
    fit.slope_se = n > 2 ? std::sqrt(ssr / (n - 2) / sxx) : 0.0;
    return fit;
}

}  // namespace subtail
