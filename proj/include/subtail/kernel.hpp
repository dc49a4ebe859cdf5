#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace subtail {

// w(s) = scale * s^-beta
struct PowerKernel {
    double beta = 0.5;
    double scale = 1.0;
};

// w(s) = scale * (s^-beta - delta^-beta) on (0, delta], zero after
struct TruncatedKernel {
    double beta = 0.5;
    double delta = 1.0;
    double scale = 1.0;
};

// c * s^-small_beta on (0,1], c0 * exp(-theta s^beta) on [1, inf), c = c0 e^-theta
struct SubexpKernel {
    double beta = 0.5;
    double theta = 1.0;
    double c0 = 1.0;
    double small_beta = 0.5;
};

// w(s) = sum kappa_i s^-beta_i / Gamma(1 - beta_i)
struct DistributedKernel {
    struct Term {
        double beta;
        double kappa;
    };
    std::vector<Term> weights;
};

enum class TailClass { Power, Exponential, Truncated };

// Piecewise log-log linear table. A repeated abscissa marks an atom of the
// Levy measure (w jumps down there). Left of the first knot the first
// segment's power law continues.
struct TabulatedKernel {
    struct Knot {
        double s;
        double w;
    };
    std::vector<Knot> knots;
    TailClass tail = TailClass::Power;
    double tail_rate = 0.0;  // exponential tail only
};

struct Atom {
    double s;
    double mass;
};

// Thrown by levy_density when asked for a density where the measure has an atom.
class AtomHere : public std::domain_error {
public:
    AtomHere(double s, double mass)
        : std::domain_error("levy measure has an atom here"), s(s), mass(mass) {}
    double s, mass;
};

class Kernel {
public:
    using Variant =
        std::variant<PowerKernel, TruncatedKernel, SubexpKernel, DistributedKernel, TabulatedKernel>;

    explicit Kernel(Variant v);

    const Variant& spec() const { return spec_; }
    std::string kind() const;

    // w(s) for s > 0.
    double w(double s) const;
    // -w'(s) on an absolutely continuous piece.
    double levy_density(double s) const;
    std::vector<Atom> atoms() const;
    // inf{s > 0 : w(s) <= y}; exact inverse where w is continuous and strictly decreasing.
    double inverse_w(double y) const;

    // Points where w or its derivative is not smooth (sorted, finite).
    std::vector<double> breakpoints() const;
    // Right end of supp(-dw); +inf for unbounded support.
    double support_end() const;

    // integral_0^eps s nu(ds)
    double small_jump_mean(double eps) const;
    // integral_0^eps s^2 nu(ds)
    double small_jump_second_moment(double eps) const;
    // integral_0^inf min(1, s) nu(ds) = integral_0^1 w
    double ker_integral() const;

    bool is_power() const { return std::holds_alternative<PowerKernel>(spec_); }

private:
    Variant spec_;
};

Kernel make_caputo(double beta);
// The five built-in variants used by the sandwich and condition checks.
std::vector<std::pair<std::string, Kernel>> builtin_kernels();

struct ScalingWitness {
    double horizon = 0.0;   // t_s (small scale) or start (large scale)
    double exponent = 0.0;  // delta in LS(-delta, .)
    double constant = 0.0;  // c in w(R)/w(r) >= c (R/r)^-delta
    bool empirical = true;
};

struct SubWitness {
    double beta = 1.0;
    double theta = 1.0;
    double c0 = 1.0;
    bool implied = false;  // derived from truncation rather than from a declared tail
};

struct TruncWitness {
    double t_f = 0.0;
    double K = 0.0;
    double slope_min = 0.0;
    double slope_max = 0.0;
    double delta3 = 0.0;
    double delta3_constant = 0.0;
};

struct ConditionEvidence {
    std::string name;
    std::size_t n_tests = 0;
    double worst_constant = 0.0;
    bool passed = false;
};

struct ConditionReport {
    bool ker_ok = false;
    std::optional<ScalingWitness> spoly;
    std::optional<ScalingWitness> lpoly;
    std::optional<SubWitness> sub;
    std::optional<TruncWitness> trunc;
    std::vector<ConditionEvidence> evidence;
    std::vector<std::string> diagnostics;
};

struct ConditionOptions {
    double lo = 1e-6;
    double hi = 1e6;
    int per_decade = 64;
    double min_constant = 0.25;
    int trunc_points = 32;
};

ConditionReport check_conditions(const Kernel& kernel, const ConditionOptions& opt = {});

}  // namespace subtail
