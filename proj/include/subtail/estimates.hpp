#pragma once

#include <optional>
#include <string>
#include <vector>

#include "subtail/bernstein.hpp"
#include "subtail/heat_kernel.hpp"
#include "subtail/kernel.hpp"
#include "subtail/tail_theory.hpp"

namespace subtail {

// Piecewise boundary/near-diagonal functions. phi_at = phi(1/t) for the time
// argument; infinite deltas mean free space.
double F_alpha_k(double s, double alpha, double phi_at, const GeometryProbe& probe);
double F_alpha_c(double s, double alpha, double phi_at, const GeometryProbe& probe);
// 0 (d < alpha), log(2 phi(1/T) / (l phi(1/t))) (d = alpha), l^(alpha-d) (d > alpha)
double G_alpha_d(double alpha, double d, double phi_at_t, double l, double phi_at_T);

// integral_lo^hi r^power a_k(r) / V(Phi^-1(r)) dr for the model's Phi, V;
// lo = 0 is allowed and gives inf when the integral diverges there.
double boundary_integral(const HKModel& model, int k, double lo, double hi, double power,
                         const GeometryProbe& probe);

struct IntegralValue {
    double value = 0.0;
    std::string note;  // "regime" when the limits are inverted
};

// integral from Phi(rho) to 1/(2 e^2 phi(1/t)) of a_k(r) / V(Phi^-1(r))
IntegralValue I_gamma_quadrature(const HKModel& model, const BernsteinTable& table, int k, double t,
                                 const GeometryProbe& probe);
// a_k(1/phi) / V(Phi^-1(1/phi)) + w(t) I
double J_gamma(const HKModel& model, const BernsteinTable& table, int k, double t, const GeometryProbe& probe);

struct ClosedI {
    double value = 0.0;
    char exponent_case = '?';  // 'a'..'g'
    int scenario = 0;          // 1..3
};
// Closed form of the k = 1 integral for power Phi and V; deltas ordered
// internally. gamma = 0 treats both deltas as infinite.
ClosedI closed_I_gamma(const HKModel& model, double phi_at, const GeometryProbe& probe);
char exponent_case(double alpha, double d, double gamma);
int boundary_scenario(const HKModel& model, double phi_at, const GeometryProbe& probe);

struct SpValue {
    double quadrature = 0.0;
    double asymptotic = 0.0;   // A-form, B-form or log(B/A)
    double endpoint_sum = 0.0;  // A^(1-p)/V(Phi^-1(A)) + B^(1-p)/V(Phi^-1(B))
    std::string branch;        // "A", "B" or "log"
};
// integral_A^B r^-p / V(Phi^-1(r)) dr with Phi = r^alpha, V = r^d
SpValue S_p(double p, double A, double B, double alpha, double d);

struct EstimateSettings {
    double margin = 2.0;
    double horizon = 1.0;  // T of the large-time statements, also used inside G
    double sub_L1 = 1.0;   // rates in e^{-lambda L t} of the beta = 1 branch
    double sub_L2 = 1.0;
};

// value = additive + prefactor * exp(-exp_argument), all free constants 1.
// When the statement gives different lower and upper forms, value is the
// lower one and upper the other.
struct EstimateValue {
    std::string tag;
    std::string branch;
    std::string regime;
    double value = 0.0;
    double upper = 0.0;
    double additive = 0.0;
    double prefactor = 0.0;
    double exp_argument = 0.0;
};

const std::vector<std::string>& estimate_tags();
// "mainsmall-ii-a" -> "mainsmall"
std::string theorem_of(const std::string& tag);

// Keeps references; model, table and kernel conditions must outlive it.
class EstimateLibrary {
public:
    EstimateLibrary(const HKModel& model, const BernsteinTable& table, ConditionReport conditions,
                    EstimateSettings settings = {});

    const HKModel& model() const { return model_; }
    const BernsteinTable& table() const { return table_; }
    const ConditionReport& conditions() const { return conds_; }
    const EstimateSettings& settings() const { return settings_; }

    // Predicate violation in words, or nothing if the tag applies at (t, x, y).
    std::optional<std::string> violation(const std::string& tag, double t, double x, double y) const;
    bool applies(const std::string& tag, double t, double x, double y) const {
        return !violation(tag, t, x, y);
    }
    // RegimeError naming the failed predicate when out of regime.
    EstimateValue evaluate(const std::string& tag, double t, double x, double y) const;
    // Tags of one theorem that apply at (t, x, y).
    std::vector<std::string> firing(const std::string& theorem, double t, double x, double y) const;

    double phi_at(double t) const { return table_.phi(1.0 / t); }
    double time_scale() const;  // T_D

private:
    EstimateValue eval_special_small(const std::string& tag, double t, const GeometryProbe& g) const;
    EstimateValue eval_special_large(const std::string& tag, double t, const GeometryProbe& g) const;
    EstimateValue eval_special_sub(const std::string& tag, double t, const GeometryProbe& g) const;
    EstimateValue eval_special_trunc(const std::string& tag, double t, const GeometryProbe& g) const;
    EstimateValue eval_main(const std::string& tag, double t, const GeometryProbe& g) const;
    EstimateValue eval_example(const std::string& tag, double t, const GeometryProbe& g) const;

    const HKModel& model_;
    const BernsteinTable& table_;
    ConditionReport conds_;
    EstimateSettings settings_;
};

}  // namespace subtail
