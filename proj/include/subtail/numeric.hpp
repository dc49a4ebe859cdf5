#pragma once

#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace subtail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kE = 2.718281828459045235360287;
inline constexpr double kPi = 3.141592653589793238462643;

// 1/(4e^2): the regime threshold shared by most small-time statements.
inline constexpr double kRegimeBound = 1.0 / (4.0 * kE * kE);

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double value, double achieved)
        : std::runtime_error(what), value_(value), achieved_(achieved) {}
    double value() const { return value_; }
    double achieved_error() const { return achieved_; }

private:
    double value_;
    double achieved_;
};

class RootError : public std::range_error {
public:
    RootError(const std::string& what, double lo, double hi, double flo, double fhi)
        : std::range_error(what), lo(lo), hi(hi), f_lo(flo), f_hi(fhi) {}
    double lo, hi, f_lo, f_hi;
};

using Fn = std::function<double(double)>;

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
};

// Finite interval, tolerates integrable endpoint singularities (tanh-sinh).
QuadResult integrate(const Fn& f, double a, double b, double rel_tol = 1e-10);

// Smooth integrand on a finite interval (adaptive Gauss-Kronrod 31).
QuadResult integrate_smooth(const Fn& f, double a, double b, double rel_tol = 1e-10);

// [a, inf) with exp-sinh.
QuadResult integrate_to_infinity(const Fn& f, double a, double rel_tol = 1e-10);

// Sum over consecutive panels [points[i], points[i+1]]. A final +inf point
// makes the last panel semi-infinite.
QuadResult integrate_panels(const Fn& f, std::span<const double> points, double rel_tol = 1e-10);

// Smallest x in [lo, hi] (geometric bisection, both positive) with
// pred(x) true, assuming pred is monotone false -> true.
double bisect_geometric(const std::function<bool(double)>& pred, double lo, double hi,
                        double rel_tol = 1e-14, int max_iter = 200);

// Root of an increasing function on [lo, hi] (lo, hi > 0), geometric bisection.
double solve_increasing(const Fn& f, double target, double lo, double hi,
                        double rel_tol = 1e-14, int max_iter = 200);

// Root of a continuous f with a sign change on [lo, hi] (0 < lo < hi),
// TOMS 748 in log x; stops once the bracket is rel_tol wide in log x.
double solve_bracketed(const Fn& f, double lo, double hi, double rel_tol = 1e-14);

struct MaxResult {
    double argmax = 0.0;
    double value = 0.0;
    bool unimodal = true;
};

// Maximize f over s > 0 starting from a guess: expand the bracket by a
// factor 4 until the guess is interior, scan 33 points for unimodality,
// then golden-section in log s.
MaxResult golden_maximize(const Fn& f, double guess, double rel_tol = 1e-10);

std::vector<double> log_grid(double lo, double hi, std::size_t n);
std::vector<double> per_decade_grid(double lo, double hi, int per_decade);
std::vector<double> linear_grid(double lo, double hi, std::size_t n);

double erf_inv(double x);

struct LinearFit {
    double intercept = 0.0;
    double slope = 0.0;
    double slope_se = 0.0;
    double max_abs_residual = 0.0;
};

LinearFit least_squares(std::span<const double> x, std::span<const double> y);

}  // namespace subtail
