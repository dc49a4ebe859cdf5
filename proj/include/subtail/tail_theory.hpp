#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "subtail/bernstein.hpp"
#include "subtail/kernel.hpp"

namespace subtail {

enum class RegimeTag {
    SmallTimePoly,     // c1 r w(t), t <= t_s
    LargeTimePoly,     // c1 r w(t), t >= T
    Subexp,            // r exp(-(theta/2) t^beta) or r exp(-theta t^beta + k r)
    TruncatedSmallR,   // [r + (n t_f - t)^n] r^n exp(-c t log t)
    TruncatedLinear,   // exp(-c t log(t/r))
    LowerTail,         // exp(-r H((phi')^-1(t/r)))
    UniversalLower,    // e^{-eL} r w(t)
    Unclassified,
};

std::string to_string(RegimeTag tag);

struct Regime {
    RegimeTag tag = RegimeTag::Unclassified;
    std::vector<std::string> constraints;  // the inequalities checked, with values
    double margin = 2.0;
};

class RegimeError : public std::domain_error {
public:
    RegimeError(const std::string& what, Regime regime) : std::domain_error(what), regime(std::move(regime)) {}
    Regime regime;
};

struct TheorySettings {
    double margin = 2.0;
    double large_T = 1.0;      // T in the large-time statements
    double sub_L = 0.5;        // r/t <= L for the subexponential forms
    double trunc_L = 0.5;      // r/t <= L for the linear truncated form
    bool sharp_sub = false;    // use theta t^beta - k r instead of (theta/2) t^beta
    double sub_k = 1.0;
};

// Structural upper-tail form: value = prefactor * exp(-c * exp_argument) at c = 1.
// The overall constant (and c where it appears) is left to the comparability fits.
struct UpperForm {
    RegimeTag tag = RegimeTag::Unclassified;
    std::string formula;
    double prefactor = 0.0;
    double exp_argument = 0.0;
    double value = 0.0;
    int n = 0;  // n_t for the truncated form
};

struct LowerTailBounds {
    double exponent = 0.0;  // r H((phi')^-1(t/r))
    double upper = 0.0;     // exp(-exponent); the lower bound is c1 exp(-c2 exponent)
};

// Keeps a reference to the table; the table must outlive this object.
class TailTheory {
public:
    TailTheory(const BernsteinTable& table, ConditionReport conditions, TheorySettings settings = {});

    const ConditionReport& conditions() const { return conds_; }
    const TheorySettings& settings() const { return settings_; }

    Regime classify(double r, double t) const;
    UpperForm upper_bound_form(double r, double t) const;
    double lower_bound_universal(double r, double t, double L) const;
    LowerTailBounds lower_tail_bounds(double r, double t, double N) const;

    // largest r with r phi(1/r) <= 1/(4e^2) and r <= t_f/6, divided by the margin
    double truncated_r_max() const;
    static int n_t(double t, double t_f);

private:
    const BernsteinTable& table_;
    ConditionReport conds_;
    TheorySettings settings_;
    double trunc_r_max_ = 0.0;
};

}  // namespace subtail
