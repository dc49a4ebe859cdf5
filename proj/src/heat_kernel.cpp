#include "subtail/heat_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "subtail/bernstein.hpp"
#include "subtail/numeric.hpp"

namespace subtail {

std::string to_string(GeometryKind kind) {
    switch (kind) {
        case GeometryKind::Interval: return "interval";
        case GeometryKind::HalfLine: return "half-line";
        case GeometryKind::Exterior: return "exterior";
        case GeometryKind::Free: return "free";
    }
    return "free";
}

GeometryKind geometry_kind_from_string(const std::string& name) {
    if (name == "interval") return GeometryKind::Interval;
    if (name == "half-line") return GeometryKind::HalfLine;
    if (name == "exterior") return GeometryKind::Exterior;
    if (name == "free" || name == "free-space") return GeometryKind::Free;
    throw std::invalid_argument("unknown geometry kind '" + name + "'");
}

Geometry::Geometry(GeometryKind kind, double length) : kind_(kind), length_(length) {
    if (kind_ == GeometryKind::Interval && !(length_ > 0 && std::isfinite(length_)))
        throw std::invalid_argument("interval length must be positive and finite");
}

bool Geometry::contains(double x) const {
    if (!std::isfinite(x)) return false;
    switch (kind_) {
        case GeometryKind::Interval: return x > 0 && x < length_;
        case GeometryKind::HalfLine: return x > 0;
        case GeometryKind::Exterior: return std::abs(x) > 1.0;
        case GeometryKind::Free: return true;
    }
    return false;
}

double Geometry::delta(double x) const {
    if (!contains(x)) throw std::domain_error("point " + std::to_string(x) + " is outside the " + to_string(kind_));
    switch (kind_) {
        case GeometryKind::Interval: return std::min(x, length_ - x);
        case GeometryKind::HalfLine: return x;
        case GeometryKind::Exterior: return std::abs(x) - 1.0;
        case GeometryKind::Free: return kInf;
    }
    return kInf;
}

double Geometry::diameter() const { return kind_ == GeometryKind::Interval ? length_ : kInf; }

double Geometry::time_scale(const BernsteinTable& table, double alpha) const {
    if (!bounded()) throw std::domain_error("time_scale: geometry is unbounded");
    return 1.0 / table.phi_inverse(kRegimeBound * std::pow(diameter(), -alpha));
}

GeometryProbe geometry_probe(const Geometry& geometry, double x, double y) {
    GeometryProbe p;
    p.delta_x = geometry.delta(x);
    p.delta_y = geometry.delta(y);
    p.rho = std::abs(x - y);
    p.delta_star = p.delta_x * p.delta_y;
    p.delta_min = std::min(p.delta_x, p.delta_y);
    p.delta_max = std::max(p.delta_x, p.delta_y);
    return p;
}

std::string to_string(Family family) {
    switch (family) {
        case Family::J1: return "J1";
        case Family::J2: return "J2";
        case Family::J3: return "J3";
        case Family::J4: return "J4";
        case Family::D1: return "D1";
        case Family::D2: return "D2";
        case Family::D3: return "D3";
        case Family::HK_J: return "HK_J";
        case Family::HK_D: return "HK_D";
        case Family::HK_M: return "HK_M";
    }
    return "?";
}

Family family_from_string(const std::string& name) {
    static const Family all[] = {Family::J1, Family::J2, Family::J3, Family::J4, Family::D1,
                                 Family::D2, Family::D3, Family::HK_J, Family::HK_D, Family::HK_M};
    for (Family f : all)
        if (to_string(f) == name) return f;
    throw std::invalid_argument("unknown model family '" + name + "'");
}

bool is_jump_family(Family f) {
    return f == Family::J1 || f == Family::J2 || f == Family::J3 || f == Family::J4 || f == Family::HK_J;
}

bool is_diffusion_family(Family f) {
    return f == Family::D1 || f == Family::D2 || f == Family::D3 || f == Family::HK_D;
}

namespace {

bool killed_family(Family f) { return f == Family::J1 || f == Family::J4 || f == Family::D1; }
bool capped_family(Family f) { return f == Family::J3 || f == Family::D3; }

// min(1, delta / scale)^power with delta = inf meaning no boundary
double cap_ratio(double delta, double scale, double power) {
    if (std::isinf(delta)) return 1.0;
    return std::pow(std::min(1.0, delta / scale), power);
}

// (Phi(delta) / (Phi(delta) + t))^gamma
double boundary_ratio(const PowerScale& Phi, double delta, double t, double gamma) {
    if (gamma == 0.0 || std::isinf(delta)) return 1.0;
    double f = Phi(delta);
    return std::pow(f / (f + t), gamma);
}

}  // namespace

HKModel::HKModel(ModelParams params, Geometry geometry) : params_(params), geometry_(geometry) {
    const auto& p = params_;
    if (!(p.alpha > 0)) throw std::invalid_argument("model: alpha must be positive");
    if (!(p.d > 0)) throw std::invalid_argument("model: d must be positive");
    if (!(p.exp_constant > 0)) throw std::invalid_argument("model: exp_constant must be positive");
    if (p.psi_exponent < 0) throw std::invalid_argument("model: psi_exponent must be non-negative");

    Phi_ = PowerScale{p.alpha, 1.0};
    V_ = PowerScale{p.d, 1.0};
    Psi_ = PowerScale{p.psi_exponent > 0 ? p.psi_exponent : p.alpha, 1.0};

    switch (p.family) {
        case Family::J1: class_ = {0.5, p.lambda_rate, 1, true, false}; break;
        case Family::J2: class_ = {0.5, 0.0, 1, true, false}; break;
        case Family::J3: class_ = {0.5, 0.0, 2, true, false}; break;
        case Family::J4: class_ = {(p.alpha - 1.0) / p.alpha, p.lambda_rate, 1, true, false}; break;
        case Family::D1: class_ = {0.5, p.lambda_rate, 1, false, true}; break;
        case Family::D2: class_ = {0.5, 0.0, 1, false, true}; break;
        case Family::D3: class_ = {0.5, 0.0, 2, false, true}; break;
        case Family::HK_J: class_ = {p.gamma, p.lambda, p.k, true, false}; break;
        case Family::HK_D: class_ = {p.gamma, p.lambda, p.k, false, true}; break;
        case Family::HK_M: class_ = {p.gamma, p.lambda, p.k, true, true}; break;
    }
    if (!(class_.gamma >= 0 && class_.gamma < 1)) throw std::invalid_argument("model: gamma must lie in [0, 1)");
    if (class_.k != 1 && class_.k != 2) throw std::invalid_argument("model: k must be 1 or 2");
    if (class_.lambda < 0) throw std::invalid_argument("model: lambda must be non-negative");
    if ((class_.diffusion || p.family == Family::J4) && !(p.alpha > 1.0))
        throw std::invalid_argument("model: family " + to_string(p.family) + " requires alpha > 1");
    if (killed_family(p.family) && !(p.lambda_rate > 0))
        throw std::invalid_argument("model: lambda_rate must be positive for " + to_string(p.family));
    if ((class_.lambda > 0 || killed_family(p.family)) && !geometry_.bounded())
        throw std::invalid_argument("model: lambda > 0 requires a bounded geometry");
}

double HKModel::a_gamma(int k, double t, const GeometryProbe& probe) const {
    return a_gamma(k, t, probe, class_.gamma);
}

double HKModel::a_gamma(int k, double t, const GeometryProbe& probe, double gamma) const {
    if (!(t > 0)) throw std::domain_error("a_gamma: t must be positive");
    if (k != 1 && k != 2) throw std::invalid_argument("a_gamma: k must be 1 or 2");
    double s = k == 1 ? t : t / (t + 1.0);
    return boundary_ratio(Phi_, probe.delta_x, s, gamma) * boundary_ratio(Phi_, probe.delta_y, s, gamma);
}

double HKModel::q_jump(double t, double l) const {
    double on = t * V_(Phi_.inverse(t));
    double off = l > 0 ? Psi_(l) * V_(l) : 0.0;
    return t / (on + off);
}

double HKModel::q_diffusion(double t, double l) const {
    double m = l > 0 ? calM(Phi_, t, l) : 0.0;
    return std::exp(-params_.exp_constant * m) / V_(Phi_.inverse(t));
}

double HKModel::boundary_factor(double t, const GeometryProbe& probe) const {
    const double a = params_.alpha;
    const double power = params_.family == Family::J4 ? a - 1.0 : a / 2.0;
    double scale = std::pow(t, 1.0 / a);
    if (capped_family(params_.family)) scale = std::min(scale, 1.0);
    return cap_ratio(probe.delta_x, scale, power) * cap_ratio(probe.delta_y, scale, power);
}

double HKModel::q_special(double t, const GeometryProbe& probe) const {
    const double a = params_.alpha, d = params_.d;
    const Family f = params_.family;
    if (killed_family(f) && t > 1.0) {
        const double power = f == Family::J4 ? a - 1.0 : a / 2.0;
        return std::exp(-params_.lambda_rate * t) * std::pow(probe.delta_x, power) * std::pow(probe.delta_y, power);
    }
    const double on = std::pow(t, -d / a);
    double core;
    if (is_jump_family(f)) {
        core = probe.rho > 0 ? std::min(on, t / std::pow(probe.rho, d + a)) : on;
    } else {
        double arg = std::pow(probe.rho, a / (a - 1.0)) / std::pow(t, 1.0 / (a - 1.0));
        core = on * std::exp(-params_.exp_constant * arg);
    }
    return boundary_factor(t, probe) * core;
}

double HKModel::q_general(double t, const GeometryProbe& probe) const {
    const auto& c = class_;
    if (t > 1.0 && c.lambda > 0) return a_gamma(1, 1.0, probe) * std::exp(-c.lambda * t);
    const int k = t <= 1.0 ? 1 : c.k;
    double core = 0.0;
    if (c.jump) core += q_jump(t, probe.rho);
    if (c.diffusion) core += q_diffusion(t, probe.rho);
    return a_gamma(k, t, probe) * core;
}

double HKModel::q(double t, double x, double y) const { return q(t, geometry_probe(geometry_, x, y)); }

double HKModel::q(double t, const GeometryProbe& probe) const {
    if (!(t > 0)) throw std::domain_error("q: t must be positive");
    switch (params_.family) {
        case Family::HK_J:
        case Family::HK_D:
        case Family::HK_M: return q_general(t, probe);
        default: return q_special(t, probe);
    }
}

std::vector<double> HKModel::time_breakpoints(const GeometryProbe& probe) const {
    std::vector<double> out{1.0};
    auto add = [&](double v) {
        if (v > 0 && std::isfinite(v)) out.push_back(v);
    };
    add(Phi_(probe.rho));
    add(Phi_(probe.delta_x));
    add(Phi_(probe.delta_y));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace subtail
