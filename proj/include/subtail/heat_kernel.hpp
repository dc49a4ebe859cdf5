#pragma once

#include <string>
#include <vector>

#include "subtail/scale.hpp"

namespace subtail {

class BernsteinTable;

// One-dimensional model domains. Exterior is {|u| > 1} with distance |u| - 1
// to the boundary; free space has no boundary (delta = +inf).
enum class GeometryKind { Interval, HalfLine, Exterior, Free };

std::string to_string(GeometryKind kind);
GeometryKind geometry_kind_from_string(const std::string& name);

struct GeometryProbe {
    double rho = 0.0;
    double delta_x = 0.0;
    double delta_y = 0.0;
    double delta_star = 0.0;  // delta_x * delta_y
    double delta_min = 0.0;
    double delta_max = 0.0;
};

class Geometry {
public:
    Geometry() = default;
    Geometry(GeometryKind kind, double length = 1.0);

    static Geometry interval(double length) { return {GeometryKind::Interval, length}; }
    static Geometry half_line() { return {GeometryKind::HalfLine}; }
    static Geometry exterior() { return {GeometryKind::Exterior}; }
    static Geometry free_space() { return {GeometryKind::Free}; }

    GeometryKind kind() const { return kind_; }
    double length() const { return length_; }
    bool bounded() const { return kind_ == GeometryKind::Interval; }
    bool contains(double x) const;
    // distance to the boundary; domain_error outside the domain
    double delta(double x) const;
    double diameter() const;

    // [phi^-1(R^-alpha / (4 e^2))]^-1; domain_error when unbounded
    double time_scale(const BernsteinTable& table, double alpha) const;

private:
    GeometryKind kind_ = GeometryKind::Free;
    double length_ = 1.0;
};

GeometryProbe geometry_probe(const Geometry& geometry, double x, double y);

enum class Family { J1, J2, J3, J4, D1, D2, D3, HK_J, HK_D, HK_M };

std::string to_string(Family family);
Family family_from_string(const std::string& name);
bool is_jump_family(Family family);      // J1..J4, HK_J
bool is_diffusion_family(Family family); // D1..D3, HK_D

struct ModelParams {
    Family family = Family::J2;
    double alpha = 1.0;
    double d = 1.0;
    // Only read by the general families; J1..D3 fix gamma and k themselves.
    double gamma = 0.5;
    double lambda = 0.0;
    int k = 1;
    double psi_exponent = 0.0;  // 0 means Psi = Phi
    double exp_constant = 1.0;
    // rate in e^{-lambda t} for J1, J4 and D1
    double lambda_rate = 1.0;
};

// Parameters (gamma, lambda, k) of the general estimate class a model
// belongs to, and which of q^j / q^d it carries.
struct EstimateClass {
    double gamma = 0.0;
    double lambda = 0.0;
    int k = 1;
    bool jump = false;
    bool diffusion = false;
};

// Representative transition density of an estimate class: every
// comparability constant is 1.
class HKModel {
public:
    HKModel(ModelParams params, Geometry geometry);

    const ModelParams& params() const { return params_; }
    const Geometry& geometry() const { return geometry_; }
    double alpha() const { return params_.alpha; }
    double d() const { return params_.d; }
    EstimateClass estimate_class() const { return class_; }

    const PowerScale& Phi() const { return Phi_; }
    const PowerScale& Psi() const { return Psi_; }
    const PowerScale& V() const { return V_; }

    // a_k^gamma(t, x, y) with the class gamma unless given
    double a_gamma(int k, double t, const GeometryProbe& probe) const;
    double a_gamma(int k, double t, const GeometryProbe& probe, double gamma) const;

    double q_jump(double t, double l) const;    // t / (t V(Phi^-1(t)) + Psi(l) V(l))
    double q_diffusion(double t, double l) const;  // exp(-c M(t, l)) / V(Phi^-1(t))

    double q(double t, double x, double y) const;
    double q(double t, const GeometryProbe& probe) const;

    // r values where q(r, x, y) changes formula or has a kink
    std::vector<double> time_breakpoints(const GeometryProbe& probe) const;

private:
    double boundary_factor(double t, const GeometryProbe& probe) const;
    double q_special(double t, const GeometryProbe& probe) const;
    double q_general(double t, const GeometryProbe& probe) const;

    ModelParams params_;
    Geometry geometry_;
    EstimateClass class_;
    PowerScale Phi_, Psi_, V_;
};

}  // namespace subtail
