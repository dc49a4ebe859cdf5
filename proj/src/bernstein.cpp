#include "subtail/bernstein.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace subtail {
namespace {

// e^-100 is far below the quadrature tolerance relative to the [0, 100] mass
// because w(x/lam) is non-increasing in x.
constexpr double kCut = 100.0;

[[noreturn]] void out_of_range(const char* what, double y, double lo, double flo, double hi, double fhi) {
    std::ostringstream os;
    os << "invert(" << what << "): level " << y << " outside the attainable range; f(" << lo
       << ") = " << flo << ", f(" << hi << ") = " << fhi;
    throw RootError(os.str(), lo, hi, flo, fhi);
}

const char* name_of(BernsteinTable::Which which) {
    switch (which) {
        case BernsteinTable::Which::Phi: return "phi";
        case BernsteinTable::Which::H: return "H";
        case BernsteinTable::Which::B: return "b";
        case BernsteinTable::Which::PhiPrime: return "phi_prime";
    }
    return "?";
}

}  // namespace

double laplace_integral(const Kernel& kernel, double lam, LaplaceWeight weight, double rel_tol) {
    if (!(lam > 0)) throw std::domain_error("laplace_integral: lambda must be positive");
    const double end = lam * kernel.support_end();
    const double top = std::min(kCut, end);
    std::vector<double> pts{0.0, top};
    auto add = [&](double x) {
        if (x > 0 && x < top) pts.push_back(x);
    };
    add(1.0);
    add(lam);
    for (double bp : kernel.breakpoints()) add(lam * bp);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    auto f = [&](double x) {
        double wt = weight == LaplaceWeight::One ? 1.0 : weight == LaplaceWeight::X ? x : 1.0 - x;
        return std::exp(-x) * wt * kernel.w(x / lam);
    };
    return integrate_panels(f, pts, rel_tol).value;
}

BernsteinTable::BernsteinTable(Kernel kernel) : BernsteinTable(std::move(kernel), Options{}) {}

BernsteinTable::BernsteinTable(Kernel kernel, Options opt) : kernel_(std::move(kernel)), opt_(opt) {
    lam_ = per_decade_grid(opt_.lam_min, opt_.lam_max, opt_.per_decade);
    phi_.reserve(lam_.size());
    dphi_.reserve(lam_.size());
    H_.reserve(lam_.size());
    for (double lam : lam_) {
        phi_.push_back(laplace(lam, LaplaceWeight::One));
        H_.push_back(laplace(lam, LaplaceWeight::X));
        dphi_.push_back(laplace(lam, LaplaceWeight::OneMinusX) / lam);
        ratio_.push_back(dphi_.back() / H_.back());
    }
}

double BernsteinTable::phi(double lam) const {
    if (lam < 0) throw std::domain_error("phi: lambda must be non-negative");
    if (lam == 0) return 0.0;
    return laplace(lam, LaplaceWeight::One);
}

double BernsteinTable::phi_prime(double lam) const {
    if (!(lam > 0)) throw std::domain_error("phi_prime: lambda must be positive");
    return laplace(lam, LaplaceWeight::OneMinusX) / lam;
}

double BernsteinTable::H(double lam) const {
    if (lam < 0) throw std::domain_error("H: lambda must be non-negative");
    if (lam == 0) return 0.0;
    return laplace(lam, LaplaceWeight::X);
}

double BernsteinTable::b(double s) const {
    if (!(s > 0)) throw std::domain_error("b: argument must be positive");
    return s * phi_prime(H_inverse(1.0 / s));
}

double BernsteinTable::invert_monotone(const Fn& f, std::span<const double> cache, bool increasing,
                                       double y) const {
    const std::size_t n = lam_.size();
    // orient so that g = sign * (f - y) is increasing in lambda
    auto above = [&](double v) { return increasing ? v >= y : v <= y; };
    double lo, hi;
    if (!above(cache[n - 1])) {
        lo = lam_[n - 1];
        double flo = cache[n - 1];
        hi = lo;
        double fhi = flo;
        while (!above(fhi)) {
            lo = hi;
            flo = fhi;
            hi *= 16.0;
            if (hi > 1e300) out_of_range("upper", y, lo, flo, hi, fhi);
            fhi = f(hi);
        }
    } else if (above(cache[0])) {
        hi = lam_[0];
        double fhi = cache[0];
        lo = hi;
        double flo = fhi;
        while (above(flo)) {
            hi = lo;
            fhi = flo;
            lo /= 16.0;
            if (lo < 1e-300) out_of_range("lower", y, lo, flo, hi, fhi);
            flo = f(lo);
        }
    } else {
        std::size_t i = 0, j = n - 1;
        while (j - i > 1) {
            std::size_t m = (i + j) / 2;
            if (above(cache[m])) j = m; else i = m;
        }
        lo = lam_[i];
        hi = lam_[j];
    }
    if (hi == lo) return lo;
    const double sign = increasing ? 1.0 : -1.0;
    auto g = [&](double lam) {
        double v = f(lam);
        if (v > 0) return sign * (std::log(v) - std::log(y));
        return sign * (v - y);
    };
    // Cached values carry quadrature error; widen by one grid cell if needed.
    double glo = g(lo), ghi = g(hi);
    const double step = std::pow(10.0, 1.0 / opt_.per_decade);
    for (int k = 0; k < 8 && glo > 0; ++k) { lo /= step; glo = g(lo); }
    for (int k = 0; k < 8 && ghi < 0; ++k) { hi *= step; ghi = g(hi); }
    return solve_bracketed(g, lo, hi, 1e-15);
}

double BernsteinTable::invert(Which which, double y) const {
    if (!(y > 0) || !std::isfinite(y)) {
        std::ostringstream os;
        os << "invert(" << name_of(which) << "): level " << y << " must be positive and finite";
        throw std::range_error(os.str());
    }
    try {
        switch (which) {
            case Which::Phi:
                return invert_monotone([this](double l) { return phi(l); }, phi_, true, y);
            case Which::H:
                return invert_monotone([this](double l) { return H(l); }, H_, true, y);
            case Which::PhiPrime:
                return invert_monotone([this](double l) { return phi_prime(l); }, dphi_, false, y);
            case Which::B: {
                // b(1/H(lam)) = phi'(lam)/H(lam), decreasing in lam
                double lam = invert_monotone([this](double l) { return phi_prime(l) / H(l); }, ratio_, false, y);
                return 1.0 / H(lam);
            }
        }
    } catch (const RootError& e) {
        std::ostringstream os;
        os << "invert(" << name_of(which) << "): " << e.what();
        throw RootError(os.str(), e.lo, e.hi, e.f_lo, e.f_hi);
    }
    return 0.0;
}

double BernsteinTable::bar_phi_alpha(double alpha, double lam, bool* envelope) const {
    if (!(alpha > 0)) throw std::domain_error("bar_phi_alpha: alpha must be positive");
    if (lam < 0) throw std::domain_error("bar_phi_alpha: lambda must be non-negative");
    if (envelope) *envelope = alpha < 1.0;
    if (lam == 0) return 0.0;
    auto g = [&](double s) { return std::pow(s, alpha) / phi(s); };
    std::vector<double> cache(lam_.size());
    for (std::size_t i = 0; i < lam_.size(); ++i) cache[i] = std::pow(lam_[i], alpha) / phi_[i];
    if (alpha >= 1.0) return invert_monotone(g, cache, true, lam);

    // running supremum: first s with g(s) >= lam
    std::size_t k = 0;
    while (k < cache.size() && cache[k] < lam) ++k;
    if (k == cache.size()) {
        double s = lam_.back();
        double prev = s;
        while (g(s) < lam) {
            prev = s;
            s *= 16.0;
            if (s > 1e300) out_of_range("bar_phi", lam, prev, g(prev), s, g(s));
        }
        return bisect_geometric([&](double x) { return g(x) >= lam; }, prev, s, 1e-14);
    }
    if (k == 0) {
        double s = lam_[0];
        while (s > 1e-300 && g(s / 16.0) >= lam) s /= 16.0;
        if (s <= 1e-300) return 0.0;
        return bisect_geometric([&](double x) { return g(x) >= lam; }, s / 16.0, s, 1e-14);
    }
    return bisect_geometric([&](double x) { return g(x) >= lam; }, lam_[k - 1], lam_[k], 1e-14);
}

OptimumReport calM_detail(const PowerScale& shape, double t, double l) {
    const double alpha = shape.lower_index();
    if (!(alpha > 1.0)) throw std::invalid_argument("calM: lower scaling index must exceed 1");
    if (!(t > 0 && l > 0)) throw std::domain_error("calM: t and l must be positive");
    double guess = std::pow(alpha * t / (shape.coef * l), 1.0 / (alpha - 1.0));
    auto res = golden_maximize([&](double s) { return l / s - t / shape(s); }, guess, 1e-10);
    return {res.value, res.argmax, res.unimodal};
}

double calM(const PowerScale& shape, double t, double l) { return calM_detail(shape, t, l).value; }

OptimumReport calN_detail(const BernsteinTable& table, const PowerScale& shape, double t, double l) {
    const double alpha = shape.lower_index();
    if (!(alpha > 1.0)) throw std::invalid_argument("calN: lower scaling index must exceed 1");
    if (!(t > 0 && l > 0)) throw std::domain_error("calN: t and l must be positive");
    // stationary point of l/s - t (kappa Phi(s))^{-1/beta} with phi ~ kappa lam^beta near 1/t
    double lam0 = 1.0 / t;
    double beta = std::clamp(lam0 * table.phi_prime(lam0) / table.phi(lam0), 0.05, 0.95);
    double kappa = table.phi(lam0) / std::pow(lam0, beta);
    double ratio = alpha / beta;
    double guess = std::pow(t * std::pow(kappa * shape.coef, -1.0 / beta) * ratio / l, 1.0 / (ratio - 1.0));
    if (!std::isfinite(guess) || guess <= 0) guess = 1.0;
    // maximize over lam = phi^-1(1/Phi(s)), a decreasing bijection of s, so
    // only forward phi evaluations are needed
    auto s_of = [&](double lam) { return shape.inverse(1.0 / table.phi(lam)); };
    auto obj = [&](double lam) { return l / s_of(lam) - t * lam; };
    auto res = golden_maximize(obj, table.phi_inverse(1.0 / shape(guess)), 1e-10);
    return {res.value, s_of(res.argmax), res.unimodal};
}

double calN(const BernsteinTable& table, const PowerScale& shape, double t, double l) {
    return calN_detail(table, shape, t, l).value;
}

}  // namespace subtail
