#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "subtail/heat_kernel.hpp"
#include "subtail/kernel.hpp"
#include "subtail/numeric.hpp"
#include "subtail/simulation.hpp"

namespace subtail {

class BernsteinTable;

// Density of the inverse subordinator E_t at a fixed t.
class TimeChangeDensity {
public:
    virtual ~TimeChangeDensity() = default;
    virtual double pdf(double r) const = 0;
    virtual double cdf(double r) const = 0;
    // typical size of E_t, used to place quadrature panels
    virtual double scale() const = 0;
    // largest r with positive density (inf if unbounded)
    virtual double support_end() const { return kInf; }
    virtual bool closed_form() const = 0;
    // smoothing bandwidth in log r (0 for closed forms)
    virtual double bandwidth() const { return 0.0; }
    double t() const { return t_; }

protected:
    explicit TimeChangeDensity(double t) : t_(t) {}
    double t_;
};

// phi(lam) = kappa sqrt(lam): P(E_t <= r) = erf(kappa r / (2 sqrt t)).
class HalfStableDensity final : public TimeChangeDensity {
public:
    HalfStableDensity(double t, double kappa = 1.0);
    double pdf(double r) const override;
    double cdf(double r) const override;
    double scale() const override { return 2.0 * std::sqrt(t_) / kappa_; }
    bool closed_form() const override { return true; }

private:
    double kappa_;
};

// Monotone cubic (Fritsch-Carlson) fit of the empirical CDF of E_t in log r
// at quantile knots; the density is its derivative.
class EmpiricalDensity final : public TimeChangeDensity {
public:
    EmpiricalDensity(double t, std::vector<double> samples, std::size_t n_knots = 48);
    double pdf(double r) const override;
    double cdf(double r) const override;
    double scale() const override { return median_; }
    double support_end() const override { return std::exp(log_r_.back()); }
    bool closed_form() const override { return false; }
    double bandwidth() const override { return bandwidth_; }

private:
    std::vector<double> log_r_, F_, slope_;
    double median_ = 1.0;
    double bandwidth_ = 0.0;
};

// Closed form when the kernel is a pure power with beta = 1/2, otherwise an
// empirical fit from a simulated ensemble.
std::unique_ptr<TimeChangeDensity> make_time_change_density(const Kernel& kernel, double t,
                                                            const SimConfig& cfg,
                                                            const BernsteinTable& table);

struct QuadValue {
    double value = 0.0;
    double error = 0.0;
    std::string note;
};

struct McValue {
    double value = 0.0;
    double se = 0.0;
    std::size_t n_paths = 0;
    std::size_t censored = 0;
    std::string diagnostic;
};

// p(t, x, y) = integral_0^inf q(r, x, y) g_t(r) dr, Gauss-Legendre on
// half-decade panels in log r plus the model's own breakpoints.
QuadValue p_quadrature(const HKModel& model, const TimeChangeDensity& density, double x, double y,
                       double rel_tol = 1e-8);
// Same integral for an arbitrary r -> q(r) (diagnostic kernels).
QuadValue p_quadrature(const std::function<double(double)>& q_of_r, const TimeChangeDensity& density,
                       std::vector<double> breakpoints = {}, double rel_tol = 1e-8);

// p(t, x, y) = E[q(E_t, x, y)] over a sampled ensemble; `level` picks the t column.
McValue p_mc(const HKModel& model, const PathEnsemble& ensemble, std::size_t level, double x, double y);
McValue p_mc(const std::function<double(double)>& q_of_r, const PathEnsemble& ensemble, std::size_t level);
McValue p_mc(const HKModel& model, const Kernel& kernel, const BernsteinTable& table, const SimConfig& cfg,
             double t, double x, double y);

struct SolveOptions {
    double rel_tol = 1e-7;
    int max_halvings = 60;
};

struct SolutionValue {
    double value = 0.0;
    double error = 0.0;
    std::size_t evaluations = 0;
    std::string note;
};

// u(t, x) = integral_D p(t, x, y) f(y) dy with panels refined geometrically
// toward y = x and toward the boundary.
SolutionValue solve_u(const HKModel& model, const TimeChangeDensity& density, double x,
                      const std::function<double(double)>& f, const SolveOptions& opt = {});

// MC-backed u on a fixed y rule; the error bar comes from the per-path
// variance of the y-integral.
SolutionValue solve_u_mc(const HKModel& model, const PathEnsemble& ensemble, std::size_t level, double x,
                         const std::function<double(double)>& f, int depth = 30);

// Leading small-r behaviour P(E_t <= r) ~ A r^n: n jumps are needed to pass
// t, A = nu^{*n}((t, inf)) / n!.
struct SmallTimeLaw {
    int n_jumps = 1;
    double coefficient = 0.0;
};
SmallTimeLaw small_time_law(const Kernel& kernel, double t);

// Finiteness of p(t, x, x): panel sums of integral q(r, x, x) g_t(r) dr over
// dyadic r-panels toward 0, with g_t replaced by its small-r law.
struct DiagonalProbe {
    SmallTimeLaw law;
    std::vector<double> panel_sums;
    double total = 0.0;
    bool converged = false;
    bool divergent = false;
    std::string verdict;
};
DiagonalProbe diagonal_probe(const Kernel& kernel, const HKModel& model, double t, double x, double r0 = 1e-2,
                             int max_panels = 60, double stop_fraction = 1e-3);

}  // namespace subtail
