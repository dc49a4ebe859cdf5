#include "subtail/tail_theory.hpp"

#include <cmath>
#include <sstream>

namespace subtail {
namespace {

std::string fmt_le(const std::string& lhs_name, double lhs, double rhs) {
    std::ostringstream os;
    os.precision(6);
    os << lhs_name << " = " << lhs << " <= " << rhs;
    return os.str();
}

std::string fmt_ge(const std::string& lhs_name, double lhs, double rhs) {
    std::ostringstream os;
    os.precision(6);
    os << lhs_name << " = " << lhs << " >= " << rhs;
    return os.str();
}

}  // namespace

std::string to_string(RegimeTag tag) {
    switch (tag) {
        case RegimeTag::SmallTimePoly: return "small-t-poly";
        case RegimeTag::LargeTimePoly: return "large-t-poly";
        case RegimeTag::Subexp: return "subexp";
        case RegimeTag::TruncatedSmallR: return "truncated-small-r";
        case RegimeTag::TruncatedLinear: return "truncated-linear";
        case RegimeTag::LowerTail: return "lower-tail";
        case RegimeTag::UniversalLower: return "universal-lower";
        case RegimeTag::Unclassified: return "unclassified";
    }
    return "unclassified";
}

TailTheory::TailTheory(const BernsteinTable& table, ConditionReport conditions, TheorySettings settings)
    : table_(table), conds_(std::move(conditions)), settings_(settings) {
    if (conds_.trunc) {
        const double t_f = conds_.trunc->t_f;
        auto excess = [&](double r) { return r * table_.phi(1.0 / r) - kRegimeBound; };
        double cap = t_f / 6.0;
        double r0 = excess(cap) <= 0 ? cap : solve_bracketed(excess, 1e-30 * cap, cap, 1e-12);
        trunc_r_max_ = r0 / settings_.margin;
    }
}

double TailTheory::truncated_r_max() const { return trunc_r_max_; }

int TailTheory::n_t(double t, double t_f) { return static_cast<int>(std::floor(t / t_f)) + 1; }

Regime TailTheory::classify(double r, double t) const {
    if (!(r > 0 && t > 0)) throw std::domain_error("classify: r and t must be positive");
    const double m = settings_.margin;
    const double poly_bound = kRegimeBound / m;
    const double rphi = r * table_.phi(1.0 / t);
    Regime out;
    out.margin = m;

    if (conds_.trunc) {
        const double t_f = conds_.trunc->t_f;
        if (t >= t_f / 2.0) {
            if (r <= trunc_r_max_) {
                out.tag = RegimeTag::TruncatedSmallR;
                out.constraints = {fmt_le("r", r, trunc_r_max_), fmt_ge("t", t, t_f / 2.0)};
                return out;
            }
            if (r / t <= settings_.trunc_L / m) {
                out.tag = RegimeTag::TruncatedLinear;
                out.constraints = {fmt_le("r/t", r / t, settings_.trunc_L / m), fmt_ge("t", t, t_f / 2.0)};
                return out;
            }
            out.constraints = {"t >= t_f/2 but r exceeds both truncated regimes"};
            return out;
        }
    }
    if (conds_.spoly && t <= conds_.spoly->horizon / m && rphi <= poly_bound) {
        out.tag = RegimeTag::SmallTimePoly;
        out.constraints = {fmt_le("t", t, conds_.spoly->horizon / m), fmt_le("r*phi(1/t)", rphi, poly_bound)};
        return out;
    }
    if (conds_.lpoly && t >= settings_.large_T * m && rphi <= poly_bound) {
        out.tag = RegimeTag::LargeTimePoly;
        out.constraints = {fmt_ge("t", t, settings_.large_T * m), fmt_le("r*phi(1/t)", rphi, poly_bound)};
        return out;
    }
    if (conds_.sub && !conds_.sub->implied && t >= settings_.large_T * m && r / t <= settings_.sub_L / m) {
        out.tag = RegimeTag::Subexp;
        out.constraints = {fmt_ge("t", t, settings_.large_T * m), fmt_le("r/t", r / t, settings_.sub_L / m)};
        return out;
    }
    out.constraints = {fmt_le("r*phi(1/t)", rphi, poly_bound) + " or a tail condition failed"};
    return out;
}

UpperForm TailTheory::upper_bound_form(double r, double t) const {
    Regime reg = classify(r, t);
    UpperForm f;
    f.tag = reg.tag;
    switch (reg.tag) {
        case RegimeTag::SmallTimePoly:
        case RegimeTag::LargeTimePoly:
            f.formula = "c1 * r * w(t)";
            f.prefactor = r * table_.kernel().w(t);
            break;
        case RegimeTag::Subexp: {
            const auto& s = *conds_.sub;
            if (settings_.sharp_sub && s.beta < 1.0) {
                f.formula = "c2 * r * exp(-theta t^beta + k r)";
                f.prefactor = r * std::exp(settings_.sub_k * r);
                f.exp_argument = s.theta * std::pow(t, s.beta);
            } else {
                f.formula = "c2 * r * exp(-(theta/2) t^beta)";
                f.prefactor = r;
                f.exp_argument = 0.5 * s.theta * std::pow(t, s.beta);
            }
            break;
        }
        case RegimeTag::TruncatedSmallR: {
            const double t_f = conds_.trunc->t_f;
            f.n = n_t(t, t_f);
            f.formula = "[r + (n t_f - t)^n] r^n exp(-c t log t)";
            f.prefactor = (r + std::pow(f.n * t_f - t, f.n)) * std::pow(r, f.n);
            f.exp_argument = t * std::log(t);
            break;
        }
        case RegimeTag::TruncatedLinear:
            f.formula = "exp(-c t log(t/r))";
            f.prefactor = 1.0;
            f.exp_argument = t * std::log(t / r);
            break;
        default: {
            std::ostringstream os;
            os << "upper_bound_form: (r, t) = (" << r << ", " << t << ") is unclassified";
            for (const auto& c : reg.constraints) os << "; " << c;
            throw RegimeError(os.str(), reg);
        }
    }
    f.value = f.prefactor * std::exp(-f.exp_argument);
    return f;
}

double TailTheory::lower_bound_universal(double r, double t, double L) const {
    double rphi = r * table_.phi(1.0 / t);
    if (rphi > L) {
        Regime reg;
        reg.tag = RegimeTag::UniversalLower;
        reg.constraints = {fmt_le("r*phi(1/t)", rphi, L)};
        throw RegimeError("lower_bound_universal: violated " + reg.constraints[0], reg);
    }
    return std::exp(-kE * L) * r * table_.kernel().w(t);
}

LowerTailBounds TailTheory::lower_tail_bounds(double r, double t, double N) const {
    double need = settings_.margin * N * table_.b_inverse(t);
    if (r < need) {
        Regime reg;
        reg.tag = RegimeTag::LowerTail;
        reg.constraints = {fmt_ge("r", r, need)};
        throw RegimeError("lower_tail_bounds: violated " + reg.constraints[0], reg);
    }
    LowerTailBounds out;
    out.exponent = r * table_.H(table_.phi_prime_inverse(t / r));
    out.upper = std::exp(-out.exponent);
    return out;
}

}  // namespace subtail
