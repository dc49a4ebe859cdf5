#pragma once

#include <span>
#include <vector>

#include "subtail/kernel.hpp"
#include "subtail/numeric.hpp"
#include "subtail/scale.hpp"

namespace subtail {

enum class LaplaceWeight { One, X, OneMinusX };

// integral_0^inf e^-x weight(x) w(x/lam) dx, split at x = 1, x = lam and lam * breakpoints.
// weight One gives phi(lam), X gives H(lam), OneMinusX gives lam phi'(lam).
double laplace_integral(const Kernel& kernel, double lam, LaplaceWeight weight, double rel_tol = 1e-11);
inline double phi_direct(const Kernel& kernel, double lam) {
    return lam == 0 ? 0.0 : laplace_integral(kernel, lam, LaplaceWeight::One);
}

// Laplace exponent phi, phi', H = phi - lambda phi', b(s) = s phi'(H^-1(1/s))
// of one kernel, plus cached log-grid values used to seed inversions.
class BernsteinTable {
public:
    struct Options {
        double lam_min = 1e-9;
        double lam_max = 1e9;
        int per_decade = 96;
        double rel_tol = 1e-11;
    };

    enum class Which { Phi, H, B, PhiPrime };

    explicit BernsteinTable(Kernel kernel);
    BernsteinTable(Kernel kernel, Options opt);

    const Kernel& kernel() const { return kernel_; }
    const Options& options() const { return opt_; }

    double phi(double lam) const;
    double phi_prime(double lam) const;
    double H(double lam) const;
    double b(double s) const;

    // forward(invert(which, y)) = y; range_error if y is outside the range.
    double invert(Which which, double y) const;
    double phi_inverse(double y) const { return invert(Which::Phi, y); }
    double H_inverse(double y) const { return invert(Which::H, y); }
    double b_inverse(double y) const { return invert(Which::B, y); }
    double phi_prime_inverse(double y) const { return invert(Which::PhiPrime, y); }

    // inf{s > 0 : s^alpha / phi(s) >= lam}. For alpha < 1 the running
    // supremum of s^alpha/phi(s) is used and *envelope is set.
    double bar_phi_alpha(double alpha, double lam, bool* envelope = nullptr) const;

    std::span<const double> grid() const { return lam_; }
    std::span<const double> phi_cache() const { return phi_; }
    std::span<const double> phi_prime_cache() const { return dphi_; }
    std::span<const double> H_cache() const { return H_; }

private:
    double laplace(double lam, LaplaceWeight weight) const {
        return laplace_integral(kernel_, lam, weight, opt_.rel_tol);
    }
    double invert_monotone(const Fn& f, std::span<const double> cache, bool increasing, double y) const;

    Kernel kernel_;
    Options opt_;
    std::vector<double> lam_, phi_, dphi_, H_, ratio_;
};

struct OptimumReport {
    double value = 0.0;
    double argmax = 0.0;
    bool unimodal = true;
};

// sup_{s>0} { l/s - t/Phi(s) }
OptimumReport calM_detail(const PowerScale& shape, double t, double l);
double calM(const PowerScale& shape, double t, double l);

// sup_{s>0} { l/s - t phi^-1(1/Phi(s)) }
OptimumReport calN_detail(const BernsteinTable& table, const PowerScale& shape, double t, double l);
double calN(const BernsteinTable& table, const PowerScale& shape, double t, double l);

// (e^2 - e)/(e - 2): upper constant in phi(1/s)^-1 <= b^-1(s) <= C phi(1/s)^-1
inline constexpr double kSandwichConstant = (kE * kE - kE) / (kE - 2.0);

}  // namespace subtail
