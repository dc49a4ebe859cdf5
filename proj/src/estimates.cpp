#include "subtail/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

#include "subtail/numeric.hpp"

namespace subtail {
namespace {

constexpr double kHalfDecade = 1.151292546497022842;
constexpr double kCaseTol = 1e-12;

double log_plus(double v) { return v > 1.0 ? std::log(v) : 0.0; }

double pw(double base, double e) {
    if (std::isinf(base)) return e > 0 ? kInf : (e < 0 ? 0.0 : 1.0);
    return std::pow(base, e);
}

// min(1, num/den) with num = inf meaning 1
double cap1(double num, double den) {
    if (std::isinf(num)) return 1.0;
    if (den <= 0) return 1.0;
    return std::min(1.0, num / den);
}

std::string fmt(const std::string& what, double lhs, const char* op, double rhs) {
    std::ostringstream os;
    os.precision(6);
    os << what << " = " << lhs << ' ' << op << ' ' << rhs;
    return os.str();
}

[[noreturn]] void regime_fail(const std::string& tag, const std::string& why, double margin) {
    Regime r;
    r.constraints = {why};
    r.margin = margin;
    throw RegimeError(tag + ": out of regime, " + why, r);
}

bool in(Family f, std::initializer_list<Family> set) { return std::find(set.begin(), set.end(), f) != set.end(); }

}  // namespace

double F_alpha_k(double s, double alpha, double phi_at, const GeometryProbe& g) {
    const double P = 1.0 / phi_at;
    const double rho = g.rho;
    const bool ind = !std::isinf(g.delta_star) && pw(g.delta_star, alpha / 2.0) <= P;
    const double half = alpha / 2.0;
    if (s > alpha) return pw(rho, alpha - s);
    if (s == alpha) {
        double num = std::min(2.0 * P, 2.0 * pw(g.delta_min, alpha));
        return 1.0 + log_plus(num / pw(rho, alpha));
    }
    if (!ind) return 0.0;
    const double ds_half = pw(g.delta_star, half);
    if (s < 0) return std::max(pw(rho, alpha), ds_half) * pw(phi_at, -s / alpha);
    if (s == 0) {
        double den = std::max(pw(rho, alpha), pw(g.delta_max, alpha));
        return std::max(pw(rho, alpha), ds_half) * log_plus(2.0 * P / den);
    }
    if (s < half) return std::max(pw(rho, alpha - s), ds_half * pw(g.delta_max, -s));
    if (s == half) {
        double ratio = std::max(rho, 2.0 * g.delta_max) / std::max(rho, g.delta_min);
        return pw(rho, half) + pw(g.delta_min, half) * std::log(ratio);
    }
    return std::max(pw(rho, alpha - s), pw(g.delta_min, alpha - s));
}

double F_alpha_c(double s, double alpha, double phi_at, const GeometryProbe& g) {
    if (s >= alpha) return F_alpha_k(s, alpha, phi_at, g);
    const double P = 1.0 / phi_at;
    const double rho = g.rho;
    const bool ind = !std::isinf(g.delta_star) && pw(g.delta_star, alpha / 2.0) <= P;
    if (!ind) return 0.0;
    const double lo = 2.0 - alpha;
    const double ds = pw(g.delta_star, alpha - 1.0);
    if (s < lo) return std::max(pw(rho, 2 * alpha - 2), ds) * pw(phi_at, -(lo - s) / alpha);
    if (s == lo) {
        double den = std::max(pw(rho, alpha), pw(g.delta_max, alpha));
        return std::max(pw(rho, 2 * alpha - 2), ds) * log_plus(2.0 * P / den);
    }
    if (s < 1.0) return std::max(pw(rho, alpha - s), ds * pw(g.delta_max, lo - s));
    if (s == 1.0) {
        double ratio = std::max(rho, 2.0 * g.delta_max) / std::max(rho, g.delta_min);
        return pw(rho, alpha - 1.0) + pw(g.delta_min, alpha - 1.0) * std::log(ratio);
    }
    return std::max(pw(rho, alpha - s), pw(g.delta_min, alpha - s));
}

double G_alpha_d(double alpha, double d, double phi_at_t, double l, double phi_at_T) {
    if (d < alpha) return 0.0;
    if (d == alpha) return std::log(2.0 * phi_at_T / (l * phi_at_t));
    return std::pow(l, alpha - d);
}

double boundary_integral(const HKModel& model, int k, double lo, double hi, double power, const GeometryProbe& g) {
    if (!(hi > lo)) return 0.0;
    const double slope = power - model.d() / model.alpha() + 1.0;  // integrand ~ r^(slope-1) at 0
    double ulo;
    if (lo <= 0.0) {
        if (slope <= 0.0) return kInf;
        ulo = std::log(hi) - std::min(700.0, 40.0 / slope);
    } else {
        ulo = std::log(lo);
    }
    const double uhi = std::log(hi);
    std::vector<double> knots;
    for (double u = ulo; u < uhi; u += kHalfDecade) knots.push_back(u);
    knots.push_back(uhi);
    for (double delta : {g.delta_x, g.delta_y}) {
        if (std::isinf(delta)) continue;
        double u = std::log(model.Phi()(delta));
        if (u > ulo && u < uhi) knots.push_back(u);
    }
    std::sort(knots.begin(), knots.end());
    auto f = [&](double u) {
        double r = std::exp(u);
        return std::pow(r, power + 1.0) * model.a_gamma(k, r, g) / model.V()(model.Phi().inverse(r));
    };
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i)
        if (knots[i + 1] > knots[i]) sum += boost::math::quadrature::gauss<double, 20>::integrate(f, knots[i], knots[i + 1]);
    return sum;
}

IntegralValue I_gamma_quadrature(const HKModel& model, const BernsteinTable& table, int k, double t,
                                 const GeometryProbe& g) {
    const double lo = model.Phi()(g.rho);
    const double hi = 1.0 / (2.0 * kE * kE * table.phi(1.0 / t));
    if (lo >= hi) return {0.0, "regime"};
    return {boundary_integral(model, k, lo, hi, 0.0, g), ""};
}

double J_gamma(const HKModel& model, const BernsteinTable& table, int k, double t, const GeometryProbe& g) {
    const double s = 1.0 / table.phi(1.0 / t);
    const double first = model.a_gamma(k, s, g) / model.V()(model.Phi().inverse(s));
    return first + table.kernel().w(t) * I_gamma_quadrature(model, table, k, t, g).value;
}

char exponent_case(double alpha, double d, double gamma) {
    const double r = d / alpha;
    auto eq = [](double a, double b) { return std::abs(a - b) <= kCaseTol * std::max(1.0, std::abs(b)); };
    if (eq(r, 1.0)) return 'f';
    if (r > 1.0) return 'g';
    if (gamma > 0 && eq(r, 1.0 - 2.0 * gamma)) return 'b';
    if (gamma > 0 && eq(r, 1.0 - gamma)) return 'd';
    if (r < 1.0 - 2.0 * gamma) return 'a';
    if (r < 1.0 - gamma) return 'c';
    if (r < 1.0) return 'e';
    throw std::domain_error("closed_I_gamma: exponents not covered by the closed-form cases");
}

int boundary_scenario(const HKModel& model, double phi_at, const GeometryProbe& probe) {
    const auto& Phi = model.Phi();
    const double gamma = model.estimate_class().gamma;
    if (gamma == 0.0 || std::isinf(probe.delta_min)) return 3;
    const double fx = Phi(probe.delta_min), fy = Phi(probe.delta_max), fl = Phi(probe.rho);
    if (fx <= 4.0 * fl) return 1;
    if (fy <= 1.0 / (4.0 * kE * kE * phi_at)) return 2;
    return 3;
}

ClosedI closed_I_gamma(const HKModel& model, double phi_at, const GeometryProbe& probe) {
    const auto& Phi = model.Phi();
    const auto& V = model.V();
    const double gamma = model.estimate_class().gamma;
    ClosedI out;
    out.exponent_case = exponent_case(model.alpha(), model.d(), gamma);
    out.scenario = boundary_scenario(model, phi_at, probe);
    const double l = probe.rho;
    const double fl = Phi(l);
    const double v_phi = V(Phi.inverse(1.0 / phi_at));
    const double sc3 = 1.0 / (phi_at * v_phi);
    double fx = 0, fy = 0, dstar = 0;
    if (out.scenario != 3) {
        fx = Phi(probe.delta_min);
        fy = Phi(probe.delta_max);
        dstar = std::pow(fx * fy, gamma);
    }
    const int sc = out.scenario;
    auto near_l = [&] { return dstar * std::pow(fl, 1.0 - 2.0 * gamma) / V(l); };
    switch (out.exponent_case) {
        case 'a':
            out.value = sc == 3 ? sc3 : dstar * std::pow(phi_at, 2.0 * gamma - 1.0) / v_phi;
            break;
        case 'b':
            if (sc == 1) out.value = dstar * std::log(1.0 / (fl * phi_at));
            else if (sc == 2) out.value = dstar * std::log(1.0 / (fy * phi_at));
            else out.value = sc3;
            break;
        case 'c':
            if (sc == 1) out.value = near_l();
            else if (sc == 2) out.value = dstar * std::pow(fy, 1.0 - 2.0 * gamma) / V(probe.delta_max);
            else out.value = sc3;
            break;
        case 'd':
            if (sc == 1) out.value = near_l();
            else if (sc == 2) out.value = std::pow(fx, gamma) * std::log(2.0 * fy / fx);
            else out.value = sc3;
            break;
        case 'e':
            if (sc == 1) out.value = near_l();
            else if (sc == 2) out.value = fx / V(probe.delta_min);
            else out.value = sc3;
            break;
        case 'f':
            if (sc == 1) out.value = dstar * std::pow(fl, -2.0 * gamma);
            else if (sc == 2) out.value = std::log(fx / fl);
            else out.value = std::log(1.0 / (fl * phi_at));
            break;
        default:
            out.value = sc == 1 ? near_l() : fl / V(l);
            break;
    }
    return out;
}

SpValue S_p(double p, double A, double B, double alpha, double d) {
    if (!(A > 0 && B > A)) throw std::domain_error("S_p: need 0 < A < B");
    const double e = d / alpha;
    auto term = [&](double r) { return std::pow(r, 1.0 - p - e); };
    SpValue out;
    out.quadrature = integrate([&](double r) { return std::pow(r, -p - e); }, A, B, 1e-10).value;
    out.endpoint_sum = term(A) + term(B);
    const double crit = 1.0 - p;
    if (std::abs(e - crit) <= kCaseTol) {
        out.branch = "log";
        out.asymptotic = std::log(B / A);
    } else if (e > crit) {
        out.branch = "A";
        out.asymptotic = term(A);
    } else {
        out.branch = "B";
        out.asymptotic = term(B);
    }
    return out;
}

const std::vector<std::string>& estimate_tags() {
    static const std::vector<std::string> tags = {
        "specialsmall-i-a", "specialsmall-i-b", "specialsmall-ii-a", "specialsmall-ii-b", "specialsmall-ii-c",
        "speciallarge-i",   "speciallarge-ii",  "speciallarge-iii",  "speciallarge-iv",   "speciallarge-v",
        "specialsub-i",     "specialsub-ii",    "specialtrunc-i",    "specialtrunc-ii",   "specialtrunc-iii",
        "mainsmall-i",      "mainsmall-ii-a",   "mainsmall-ii-b",    "mainsmall-ii-c",    "mainlarge-i",
        "mainlarge-ii",     "mainsub-i",        "mainsub-ii",        "main2-i",           "main2-ii",
        "example1-small",   "example1-large",   "example2-i",        "example2-ii",       "example2-iii",
    };
    return tags;
}

std::string theorem_of(const std::string& tag) { return tag.substr(0, tag.find('-')); }

EstimateLibrary::EstimateLibrary(const HKModel& model, const BernsteinTable& table, ConditionReport conditions,
                                 EstimateSettings settings)
    : model_(model), table_(table), conds_(std::move(conditions)), settings_(settings) {
    if (!(settings_.margin >= 1.0)) throw std::invalid_argument("EstimateLibrary: margin must be >= 1");
}

double EstimateLibrary::time_scale() const { return model_.geometry().time_scale(table_, model_.alpha()); }

std::vector<std::string> EstimateLibrary::firing(const std::string& theorem, double t, double x, double y) const {
    std::vector<std::string> out;
    for (const auto& tag : estimate_tags())
        if (theorem_of(tag) == theorem && applies(tag, t, x, y)) out.push_back(tag);
    return out;
}

std::optional<std::string> EstimateLibrary::violation(const std::string& tag, double t, double x, double y) const {
    const auto& known = estimate_tags();
    if (std::find(known.begin(), known.end(), tag) == known.end()) return "unknown estimate tag '" + tag + "'";
    if (!(t > 0)) return "t must be positive";
    const Geometry& geo = model_.geometry();
    if (!geo.contains(x) || !geo.contains(y)) return "x and y must lie in the domain";
    const GeometryProbe g = geometry_probe(geo, x, y);
    const Family fam = model_.params().family;
    const EstimateClass cls = model_.estimate_class();
    const double m = settings_.margin;
    const double B = kRegimeBound;
    const double phi = phi_at(t);
    const double near_v = model_.Phi()(g.rho) * phi;
    const bool near = near_v <= B / m;
    const bool off = near_v > B * m;
    const std::string near_txt = fmt("Phi(rho) phi(1/t)", near_v, "<=", B / m);
    const std::string off_txt = fmt("Phi(rho) phi(1/t)", near_v, ">", B * m);
    const std::string gap_txt = "Phi(rho) phi(1/t) = " + std::to_string(near_v) + " lies in the margin gap";
    const std::string th = theorem_of(tag);
    const std::string branch = tag.substr(th.size() + 1);
    using enum Family;

    auto need_family = [&](std::initializer_list<Family> set) -> std::optional<std::string> {
        if (in(fam, set)) return std::nullopt;
        return "family " + to_string(fam) + " is not covered by " + tag;
    };
    auto bounded = [&]() -> std::optional<std::string> {
        if (geo.bounded()) return std::nullopt;
        return std::string("needs a bounded domain");
    };
    auto side = [&](bool want_near) -> std::optional<std::string> {
        if (want_near && !near) return near_txt;
        if (!want_near && !off) return off_txt;
        return std::nullopt;
    };
    auto no_gap = [&]() -> std::optional<std::string> {
        if (near || off) return std::nullopt;
        return gap_txt;
    };

    if (th == "specialsmall" || th == "mainsmall") {
        if (!conds_.spoly) return "small-time polynomial condition not witnessed";
        if (t > conds_.spoly->horizon) return fmt("t", t, "<=", conds_.spoly->horizon);
    }
    if (th == "speciallarge" || th == "mainlarge") {
        if (!conds_.lpoly) return "large-time polynomial condition not witnessed";
        if (t < settings_.horizon) return fmt("t", t, ">=", settings_.horizon);
    }
    if (th == "specialsub" || th == "mainsub") {
        if (!conds_.sub) return "subexponential condition not witnessed";
        if (th == "specialsub" && (conds_.sub->implied || !(conds_.sub->beta < 1.0)))
            return "needs a declared subexponential tail with beta < 1";
        if (t < settings_.horizon) return fmt("t", t, ">=", settings_.horizon);
    }
    if (th == "specialtrunc" || th == "main2") {
        if (!conds_.trunc) return "truncation condition not witnessed";
        if (t < conds_.trunc->t_f / 2.0) return fmt("t", t, ">=", conds_.trunc->t_f / 2.0);
    }

    if (th == "specialsmall") {
        if (branch == "i-a") {
            if (auto v = need_family({J1, J2, J3, D1, D2, D3})) return v;
            return side(true);
        }
        if (branch == "i-b") {
            if (auto v = need_family({J4})) return v;
            return side(true);
        }
        if (branch == "ii-a") {
            if (auto v = need_family({J1, J2, J3})) return v;
            return side(false);
        }
        if (branch == "ii-b") {
            if (auto v = need_family({J4})) return v;
            return side(false);
        }
        if (auto v = need_family({D1, D2, D3})) return v;
        return side(false);
    }
    if (th == "speciallarge") {
        if (branch == "i") {
            if (auto v = need_family({J1, D1})) return v;
            return bounded();
        }
        if (branch == "ii") {
            if (auto v = need_family({J4})) return v;
            return bounded();
        }
        if (branch == "iii") {
            if (auto v = need_family({J2})) return v;
            return no_gap();
        }
        if (branch == "iv") {
            if (auto v = need_family({D2})) return v;
            return no_gap();
        }
        if (auto v = need_family({J3, D3})) return v;
        return no_gap();
    }
    if (th == "specialsub") {
        if (auto v = need_family(branch == "i" ? std::initializer_list<Family>{J1, D1} : std::initializer_list<Family>{J4}))
            return v;
        return bounded();
    }
    if (th == "specialtrunc") {
        if (branch == "i") {
            if (auto v = need_family({J1, D1})) return v;
            return bounded();
        }
        if (branch == "ii") {
            if (auto v = need_family({J4})) return v;
            return bounded();
        }
        if (auto v = need_family({J2, J3, D2, D3})) return v;
        const double t_f = conds_.trunc->t_f;
        const double a = model_.alpha(), d = model_.d();
        const double thr = std::floor((d + a) / a) * t_f;
        const double rv = std::pow(g.rho, a) * phi;
        if (t < thr && rv > 1.0 / m && rv <= m) return fmt("rho^alpha phi(1/t)", rv, "outside the margin gap", m);
        return std::nullopt;
    }
    if (th == "mainsmall") {
        if (branch == "i") return side(true);
        if (auto v = side(false)) return v;
        if (branch == "ii-a" && !(cls.jump && !cls.diffusion)) return "needs a jump-type estimate class";
        if (branch == "ii-b" && !(cls.diffusion && !cls.jump)) return "needs a diffusion-type estimate class";
        if (branch == "ii-c" && !(cls.diffusion && cls.jump)) return "needs a mixed estimate class";
        return std::nullopt;
    }
    if (th == "mainlarge" || th == "mainsub" || th == "main2") {
        if (branch == "i") {
            if (cls.lambda != 0.0) return fmt("lambda", cls.lambda, "==", 0.0);
            if (th == "main2") {
                const double ft = model_.Phi()(g.rho);
                if (ft > t / m && ft <= t * m) return fmt("Phi(rho)/t", ft / t, "outside the margin gap", m);
                return std::nullopt;
            }
            return no_gap();
        }
        if (!(cls.lambda > 0)) return fmt("lambda", cls.lambda, ">", 0.0);
        return bounded();
    }
    if (th == "example1") {
        const auto* tk = std::get_if<TruncatedKernel>(&table_.kernel().spec());
        if (!tk) return "needs the truncated kernel";
        if (geo.kind() != GeometryKind::Free) return "needs free space";
        const double a = model_.alpha();
        if (a < 2.0 && !cls.jump) return "alpha < 2 needs a jump-type model";
        if (a == 2.0 && !cls.diffusion) return "alpha = 2 needs a diffusion-type model";
        if (a > 2.0) return "needs alpha <= 2";
        const double delta = tk->delta;
        if (branch == "small") {
            if (t > delta / 2.0) return fmt("t", t, "<=", delta / 2.0);
            const double rv = std::pow(g.rho, a) / std::pow(t, tk->beta);
            if (rv > 1.0 / m && rv <= m) return fmt("|x-y|^alpha / t^beta", rv, "outside the margin gap", m);
            return std::nullopt;
        }
        if (t < delta / 2.0) return fmt("t", t, ">=", delta / 2.0);
        const double rv = std::pow(g.rho, a) / t;
        if (rv > 1.0 / m && rv <= m) return fmt("|x-y|^alpha / t", rv, "outside the margin gap", m);
        return std::nullopt;
    }
    // example2
    if (!std::holds_alternative<DistributedKernel>(table_.kernel().spec())) return "needs the distributed kernel";
    if (geo.kind() != GeometryKind::Interval) return "needs an interval";
    if (model_.alpha() < 2.0) {
        if (auto v = need_family({J1})) return v;
    } else if (auto v = need_family({D1})) {
        return v;
    }
    if (branch == "iii") return t >= 1.0 ? std::nullopt : std::optional<std::string>(fmt("t", t, ">=", 1.0));
    if (t > 1.0) return fmt("t", t, "<=", 1.0);
    return side(branch == "i");
}

EstimateValue EstimateLibrary::evaluate(const std::string& tag, double t, double x, double y) const {
    if (auto v = violation(tag, t, x, y)) regime_fail(tag, *v, settings_.margin);
    const GeometryProbe g = geometry_probe(model_.geometry(), x, y);
    const std::string th = theorem_of(tag);
    EstimateValue out;
    if (th == "specialsmall") out = eval_special_small(tag, t, g);
    else if (th == "speciallarge") out = eval_special_large(tag, t, g);
    else if (th == "specialsub") out = eval_special_sub(tag, t, g);
    else if (th == "specialtrunc") out = eval_special_trunc(tag, t, g);
    else if (th == "example1" || th == "example2") out = eval_example(tag, t, g);
    else out = eval_main(tag, t, g);
    out.tag = tag;
    if (out.upper == 0.0) out.upper = out.value;
    std::ostringstream os;
    os.precision(6);
    os << "t = " << t << ", rho = " << g.rho << ", Phi(rho) phi(1/t) = " << model_.Phi()(g.rho) * phi_at(t);
    out.regime = os.str();
    return out;
}

namespace {

// value = additive + prefactor exp(-arg)
EstimateValue form(std::string branch, double additive, double prefactor = 0.0, double arg = 0.0) {
    EstimateValue v;
    v.branch = std::move(branch);
    v.additive = additive;
    v.prefactor = prefactor;
    v.exp_argument = arg;
    v.value = additive + (prefactor == 0.0 ? 0.0 : prefactor * std::exp(-arg));
    return v;
}

}  // namespace

EstimateValue EstimateLibrary::eval_special_small(const std::string& tag, double t, const GeometryProbe& g) const {
    const double a = model_.alpha(), d = model_.d();
    const double phi = phi_at(t);
    const double P = 1.0 / phi;
    const double w = table_.kernel().w(t);
    const bool j4 = model_.params().family == Family::J4;
    const double bexp = j4 ? a - 1.0 : a / 2.0;
    const std::string br = tag.substr(std::string("specialsmall-").size());
    if (br == "i-a" || br == "i-b") {
        double first = std::pow(cap1(g.delta_star, std::pow(P, 2.0 / a)), bexp) * std::pow(phi, d / a);
        double F = j4 ? F_alpha_c(d, a, phi, g) : F_alpha_k(d, a, phi, g);
        double second = F == 0.0 ? 0.0 : w * std::pow(cap1(g.delta_star, g.rho * g.rho), bexp) * F;
        return form("near", first + second);
    }
    const double bx = std::pow(cap1(g.delta_x, std::pow(P, 1.0 / a)), bexp);
    const double by = std::pow(cap1(g.delta_y, std::pow(P, 1.0 / a)), bexp);
    if (br == "ii-a" || br == "ii-b") return form("off", bx * by * P / std::pow(g.rho, d + a));
    const double arg = t * table_.bar_phi_alpha(a, std::pow(g.rho / t, a));
    return form("off-exp", 0.0, bx * by * std::pow(phi, d / a), arg);
}

EstimateValue EstimateLibrary::eval_special_large(const std::string& tag, double t, const GeometryProbe& g) const {
    const double a = model_.alpha(), d = model_.d();
    const double phi = phi_at(t);
    const double P = 1.0 / phi;
    const double w = table_.kernel().w(t);
    const double m = settings_.margin;
    const std::string br = tag.substr(std::string("speciallarge-").size());
    const bool near = model_.Phi()(g.rho) * phi <= kRegimeBound / m;
    const double off_mult = std::pow(cap1(g.delta_x, std::pow(P, 1.0 / a)), a / 2.0) *
                            std::pow(cap1(g.delta_y, std::pow(P, 1.0 / a)), a / 2.0);
    if (br == "i" || br == "ii") {
        const bool j4 = br == "ii";
        const double bexp = j4 ? a - 1.0 : a / 2.0;
        const double phi_TD = table_.phi(1.0 / time_scale());
        double F = j4 ? F_alpha_c(d, a, phi_TD, g) : F_alpha_k(d, a, phi_TD, g);
        double bracket = std::min(1.0, std::pow(g.delta_star, bexp)) + F;
        return form("bounded", w * std::pow(cap1(g.delta_star, g.rho * g.rho), bexp) * bracket);
    }
    if (br == "iii" || br == "iv") {
        if (near) {
            double first = std::pow(cap1(g.delta_star, std::pow(P, 2.0 / a)), a / 2.0) * std::pow(phi, d / a);
            double F = F_alpha_k(d, a, phi, g);
            double second = F == 0.0 ? 0.0 : w * std::pow(cap1(g.delta_star, g.rho * g.rho), a / 2.0) * F;
            return form("near", first + second);
        }
        if (br == "iii") return form("off", off_mult * P / std::pow(g.rho, d + a));
        const double arg = t * table_.bar_phi_alpha(a, std::pow(g.rho / t, a));
        return form("off-exp", 0.0, off_mult * std::pow(phi, d / a), arg);
    }
    // (v): boundary factors capped at unit scale
    const double unit = std::pow(std::min(1.0, g.delta_x), a / 2.0) * std::pow(std::min(1.0, g.delta_y), a / 2.0);
    if (near) {
        const double phi_T = table_.phi(1.0 / settings_.horizon);
        double v = unit * (std::pow(phi, d / a) + w * G_alpha_d(a, d, phi, std::max(1.0, g.rho), phi_T));
        if (g.rho <= 1.0) {
            const double phi_T1 = kRegimeBound;  // phi(1/T1) with T1 = 1/phi^-1(1/(4e^2))
            double F = F_alpha_k(d, a, phi_T1, g);
            if (F != 0.0) v += w * std::pow(cap1(g.delta_star, g.rho * g.rho), a / 2.0) * F;
        }
        return form("near", v);
    }
    if (model_.params().family == Family::J3) return form("off", unit * P / std::pow(g.rho, d + a));
    const double arg = t * table_.bar_phi_alpha(a, std::pow(g.rho / t, a));
    return form("off-exp", 0.0, unit * std::pow(phi, d / a), arg);
}

EstimateValue EstimateLibrary::eval_special_sub(const std::string& tag, double t, const GeometryProbe& g) const {
    const double a = model_.alpha(), d = model_.d();
    const bool j4 = tag == "specialsub-ii";
    const double bexp = j4 ? a - 1.0 : a / 2.0;
    const double phi_TD = table_.phi(1.0 / time_scale());
    double F = j4 ? F_alpha_c(d, a, phi_TD, g) : F_alpha_k(d, a, phi_TD, g);
    double bracket = std::min(1.0, std::pow(g.delta_star, bexp)) + F;
    const auto& s = *conds_.sub;
    return form("bounded", 0.0, std::pow(cap1(g.delta_star, g.rho * g.rho), bexp) * bracket,
                s.theta * std::pow(t, s.beta));
}

EstimateValue EstimateLibrary::eval_special_trunc(const std::string& tag, double t, const GeometryProbe& g) const {
    const double a = model_.alpha(), d = model_.d();
    const double t_f = conds_.trunc->t_f;
    const int n = TailTheory::n_t(t, t_f);
    const double phi = phi_at(t);
    const double P = 1.0 / phi;
    const double weight = std::pow(n * t_f - t, n);
    if (tag == "specialtrunc-i" || tag == "specialtrunc-ii") {
        const bool j4 = tag == "specialtrunc-ii";
        const double bexp = j4 ? a - 1.0 : a / 2.0;
        const double thr = std::floor(j4 ? (d + 2 * a - 2) / a : (d + a) / a) * t_f;
        if (t >= thr) return form("late", 0.0, std::pow(g.delta_star, bexp), t);
        const double phi_TD = table_.phi(1.0 / time_scale());
        auto F = [&](double s) { return j4 ? F_alpha_c(s, a, phi_TD, g) : F_alpha_k(s, a, phi_TD, g); };
        double bracket = std::min(std::pow(g.delta_star, a / 2.0), P) + F(d - a * n) + weight * F(d - a * (n - 1));
        return form("early", std::pow(cap1(g.delta_star, g.rho * g.rho), bexp) * bracket);
    }
    const double thr = std::floor((d + a) / a) * t_f;
    const bool inner = std::pow(g.rho, a) * phi <= 1.0 / settings_.margin;
    if (inner && t < thr) {
        double bracket = std::min(pw(g.delta_star, a / 2.0), P) + F_alpha_k(d - a * n, a, phi, g) +
                         weight * F_alpha_k(d - a * (n - 1), a, phi, g);
        return form("early", std::pow(cap1(g.delta_star, g.rho * g.rho), a / 2.0) * bracket);
    }
    return form("q(ct)", model_.q(t, g));
}

EstimateValue EstimateLibrary::eval_main(const std::string& tag, double t, const GeometryProbe& g) const {
    const auto cls = model_.estimate_class();
    const auto& Phi = model_.Phi();
    const auto& V = model_.V();
    const double phi = phi_at(t);
    const double s = 1.0 / phi;
    const double w = table_.kernel().w(t);
    const double m = settings_.margin;
    const int k = cls.k;
    const std::string th = theorem_of(tag);
    const std::string br = tag.substr(th.size() + 1);
    const bool near = Phi(g.rho) * phi <= kRegimeBound / m;

    auto small_forms = [&](const std::string& which) -> EstimateValue {
        const double ak = model_.a_gamma(k, s, g);
        if (which == "i") {
            return form("near", J_gamma(model_, table_, k, t, g));
        }
        const double jump = ak / (phi * model_.Psi()(g.rho) * V(g.rho));
        const double N = calN(table_, Phi, t, g.rho);
        const double diff = ak / V(Phi.inverse(s));
        if (which == "ii-a") return form("off-jump", ak / (phi * Phi(g.rho) * V(g.rho)));
        if (which == "ii-b") return form("off-diffusion", 0.0, diff, N);
        return form("off-mixed", jump, diff, N);
    };
    auto R_integral = [&](double power) {
        return boundary_integral(model_, 1, Phi(g.rho), 2.0 * Phi(model_.geometry().diameter()), power, g);
    };

    if (th == "mainsmall") return small_forms(br);
    if (th == "mainlarge") {
        if (br == "i") {
            if (near) return small_forms("i");
            return small_forms(cls.jump && cls.diffusion ? "ii-c" : (cls.jump ? "ii-a" : "ii-b"));
        }
        return form("killed", w * R_integral(0.0));
    }
    if (th == "mainsub") {
        const auto& sub = *conds_.sub;
        if (br == "i") {
            if (!near) return form("q(ct)", model_.q(t, g));
            const double first = model_.a_gamma(k, t, g) / V(Phi.inverse(t));
            const double I = I_gamma_quadrature(model_, table_, k, t, g).value;
            EstimateValue v = form("near", first + w * I);
            v.upper = first + std::exp(-0.5 * sub.theta * std::pow(t, sub.beta)) * I;
            return v;
        }
        const double IR = R_integral(0.0);
        if (sub.beta < 1.0) {
            EstimateValue v = form("killed", w * IR);
            v.upper = std::exp(-sub.theta * std::pow(t, sub.beta)) * IR;
            return v;
        }
        const double bnd = std::pow(Phi(g.delta_x) * Phi(g.delta_y), cls.gamma);
        EstimateValue v = form("killed-exp", w * IR + std::exp(-cls.lambda * settings_.sub_L1 * t) * bnd);
        v.upper = std::exp(-0.5 * sub.theta * t) * IR + std::exp(-cls.lambda * settings_.sub_L2 * t) * bnd;
        return v;
    }
    // main2
    const double t_f = conds_.trunc->t_f;
    const int n = TailTheory::n_t(t, t_f);
    const double thr = std::floor(model_.d() / model_.alpha() + 2.0 * cls.gamma) * t_f;
    const double weight = std::pow(n * t_f - t, n);
    if (br == "i") {
        if (Phi(g.rho) > t) return form("q(ct)", model_.q(t, g));
        if (t < thr) {
            const double lo = Phi(g.rho), hi = 2.0 * t;
            return form("early", boundary_integral(model_, 1, lo, hi, n, g) +
                                     weight * boundary_integral(model_, 1, lo, hi, n - 1, g));
        }
        return form("late", model_.a_gamma(k, t, g) / V(Phi.inverse(t)));
    }
    if (t < thr) return form("early", R_integral(n) + weight * R_integral(n - 1));
    return form("late", 0.0, std::pow(Phi(g.delta_x) * Phi(g.delta_y), cls.gamma), t);
}

EstimateValue EstimateLibrary::eval_example(const std::string& tag, double t, const GeometryProbe& g) const {
    const double a = model_.alpha(), d = model_.d();
    const double rho = g.rho;
    const double m = settings_.margin;
    if (tag == "example1-small") {
        const double beta = std::get<TruncatedKernel>(table_.kernel().spec()).beta;
        const bool near = std::pow(rho, a) / std::pow(t, beta) <= 1.0 / m;
        if (near) {
            if (d < a) return form("near d<alpha", std::pow(t, -beta * d / a));
            if (d == a) return form("near d=alpha", std::pow(t, -beta) * std::log(2.0 * std::pow(t, beta / a) / rho));
            return form("near d>alpha", std::pow(t, -beta) / std::pow(rho, d - a));
        }
        if (a < 2.0) return form("off", std::pow(t, beta) / std::pow(rho, d + a));
        return form("off-exp", 0.0, std::pow(t, -beta * d / a),
                    std::pow(rho, 2.0 / (2.0 - beta)) * std::pow(t, -beta / (2.0 - beta)));
    }
    if (tag == "example1-large") {
        const double delta = std::get<TruncatedKernel>(table_.kernel().spec()).delta;
        const int n = TailTheory::n_t(t, delta);
        const double ratio = d / a;
        const bool integer = std::abs(ratio - std::round(ratio)) <= kCaseTol;
        if (std::pow(rho, a) <= t / m) {
            const double weight = std::pow(n * delta - t, n);
            if (t < std::floor((d - a) / a) * delta)
                return form("near early",
                            (std::pow(rho, a) / t + weight) * std::pow(t, -n) / std::pow(rho, d - a * n));
            if (!integer && t < std::floor(ratio) * delta)
                return form("near middle", std::pow(t, -ratio) + weight * std::pow(t, -n) / std::pow(rho, d - a * n));
            if (integer && t >= (d - a) * delta / a && t < d * delta / a)
                return form("near log", std::pow(t, -ratio) + std::pow(d * delta / (a * t) - 1.0, ratio) *
                                                                  std::log(2.0 * t / std::pow(rho, a)));
            return form("near late", std::pow(t, -ratio));
        }
        if (a < 2.0) return form("off", t / std::pow(rho, d + a));
        return form("off-exp", 0.0, std::pow(t, -ratio), rho * rho / t);
    }
    // example2
    const double phi = phi_at(t);
    const double w = table_.kernel().w(t);
    const double dx = std::pow(g.delta_x, a / 2.0), dy = std::pow(g.delta_y, a / 2.0);
    if (tag == "example2-i") {
        double F = F_alpha_k(d, a, phi, g);
        double v = std::min(1.0, dx * dy * phi) * std::pow(phi, d / a);
        if (F != 0.0) v += std::min(1.0, dx * dy / std::pow(rho, a)) * F * w;
        return form("near", v);
    }
    if (tag == "example2-ii") {
        if (a < 2.0) {
            double f = std::min(1.0, dx * std::sqrt(phi)) * std::min(1.0, dy * std::sqrt(phi));
            return form("off", f / (phi * std::pow(rho, d + a)));
        }
        double f = std::min(1.0, g.delta_x * std::sqrt(phi)) * std::min(1.0, g.delta_y * std::sqrt(phi));
        return form("off-exp", 0.0, f * std::pow(phi, d / 2.0), t * table_.bar_phi_alpha(2.0, std::pow(rho / t, 2.0)));
    }
    const double phi_TD = table_.phi(1.0 / time_scale());
    double bracket = std::min(1.0, dx * dy) + F_alpha_k(d, a, phi_TD, g);
    return form("late", w * std::pow(cap1(g.delta_star, rho * rho), a / 2.0) * bracket);
}

}  // namespace subtail
