#include "subtail/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "subtail/numeric.hpp"
#include "subtail/rng.hpp"

namespace subtail {
namespace {

// Runs body(path) for every path; exceptions are rethrown after the loop.
template <class Body>
void for_each_path(std::size_t n, Backend backend, Body&& body) {
    if (backend == Backend::Serial) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex mu;
    const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < count; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard<std::mutex> lock(mu);
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
}

std::vector<std::size_t> sort_order(std::span<const double> levels) {
    std::vector<std::size_t> idx(levels.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return levels[a] < levels[b]; });
    return idx;
}

double gl8(const std::function<double(double)>& f, double a, double b) {
    return boost::math::quadrature::gauss<double, 8>::integrate(f, a, b);
}

// Jumps above eps under the tilted measure e^{tilt s} nu(ds), drawn by
// inverting a cell-wise cumulative table with Newton steps inside the cell.
class TiltedJumps {
public:
    TiltedJumps(const Kernel& kernel, double eps, double tilt) : kernel_(kernel), tilt_(tilt) {
        const double end = kernel.support_end();
        const double ratio = std::pow(10.0, 1.0 / 64.0) - 1.0;
        std::vector<double> knots = kernel.breakpoints();
        edges_.push_back(eps);
        double s = eps;
        while (s < end) {
            double next = s + std::min(s * ratio, 0.5 / tilt);
            for (double bp : knots)
                if (bp > s && bp < next) next = bp;
            if (next > end * (1.0 - 1e-13)) next = end;
            s = next;
            edges_.push_back(s);
        }
        cum_.push_back(0.0);
        for (std::size_t i = 0; i + 1 < edges_.size(); ++i)
            cum_.push_back(cum_.back() + gl8([&](double u) { return density(u); }, edges_[i], edges_[i + 1]));
        total_ = cum_.back();
    }

    double density(double s) const { return std::exp(tilt_ * s) * kernel_.levy_density(s); }
    double total() const { return total_; }

    double draw(PathRng& rng) const {
        double m = rng.uniform() * total_;
        auto it = std::upper_bound(cum_.begin(), cum_.end(), m);
        std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - cum_.begin()) - 1, edges_.size() - 2);
        double a = edges_[i], b = edges_[i + 1];
        double target = m - cum_[i];
        double x = a + (b - a) * std::clamp(target / (cum_[i + 1] - cum_[i]), 0.0, 1.0);
        for (int k = 0; k < 6; ++k) {
            double fx = gl8([&](double u) { return density(u); }, a, x) - target;
            double step = fx / density(x);
            double nx = std::clamp(x - step, a, b);
            if (std::abs(nx - x) <= 1e-14 * x) { x = nx; break; }
            x = nx;
        }
        return x;
    }

private:
    const Kernel& kernel_;
    double tilt_;
    std::vector<double> edges_, cum_;
    double total_ = 0.0;
};

struct JumpSource {
    const Kernel& kernel;
    double rate;         // total jump intensity above eps
    double w_eps;
    double drift;        // d_eps when compensating
    double tilt;
    double psi;          // integral (e^{tilt s} - 1) nu(ds) over s > eps
    std::optional<TiltedJumps> tilted;

    JumpSource(const Kernel& k, const SimConfig& cfg)
        : kernel(k), rate(0), w_eps(k.w(cfg.cutoff_eps)), drift(0), tilt(cfg.tilt), psi(0) {
        drift = cfg.compensate ? k.small_jump_mean(cfg.cutoff_eps) : 0.0;
        if (tilt > 0) {
            tilted.emplace(k, cfg.cutoff_eps, tilt);
            rate = tilted->total();
            psi = rate - w_eps;
        } else {
            rate = w_eps;
        }
    }

    double draw(PathRng& rng) const {
        if (tilted) return tilted->draw(rng);
        return kernel.inverse_w(w_eps * rng.uniform());
    }
};

}  // namespace

void validate(const Kernel& kernel, const SimConfig& cfg) {
    if (!(cfg.cutoff_eps > 0)) throw std::invalid_argument("cutoff_eps must be positive");
    if (!(cfg.cutoff_eps < kernel.support_end()))
        throw std::invalid_argument("cutoff_eps must lie strictly inside the kernel support");
    if (cfg.n_paths < 100) throw std::invalid_argument("n_paths must be at least 100");
    if (cfg.tilt < 0) throw std::invalid_argument("tilt must be non-negative");
    if (cfg.tilt > 0 && !std::isfinite(kernel.support_end()))
        throw std::invalid_argument("tilt needs a kernel with bounded support");
    if (cfg.tilt > 0 && !kernel.atoms().empty())
        throw std::invalid_argument("tilt is not supported for kernels with atoms");
    double w = kernel.w(cfg.cutoff_eps);
    if (!std::isfinite(w) || w > 1e15) {
        std::ostringstream os;
        os << "w(cutoff_eps) = " << w << " is too large; raise cutoff_eps";
        throw std::invalid_argument(os.str());
    }
}

std::vector<double> PathEnsemble::column(std::size_t level) const {
    std::vector<double> out(n_paths);
    for (std::size_t p = 0; p < n_paths; ++p) out[p] = value(p, level);
    return out;
}

std::size_t PathEnsemble::censored_count(std::size_t level) const {
    if (censored.empty()) return 0;
    std::size_t c = 0;
    for (std::size_t p = 0; p < n_paths; ++p) c += censored[p * levels.size() + level];
    return c;
}

PathEnsemble sample_S_at(const Kernel& kernel, const SimConfig& cfg, std::span<const double> r_levels) {
    validate(kernel, cfg);
    for (double r : r_levels)
        if (!(r > 0)) throw std::domain_error("sample_S_at: r must be positive");
    const JumpSource src(kernel, cfg);
    const auto order = sort_order(r_levels);
    const std::size_t L = r_levels.size();

    PathEnsemble ens;
    ens.kind = PathEnsemble::Kind::SubordinatorAt;
    ens.levels.assign(r_levels.begin(), r_levels.end());
    ens.n_paths = cfg.n_paths;
    ens.values.assign(cfg.n_paths * L, 0.0);
    if (cfg.tilt > 0) ens.weights.assign(cfg.n_paths * L, 1.0);
    ens.seed = cfg.seed;
    ens.eps = cfg.cutoff_eps;
    ens.tilt = cfg.tilt;

    for_each_path(cfg.n_paths, cfg.backend, [&](std::size_t path) {
        PathRng rng(cfg.seed, path);
        double clock = 0.0, big = 0.0;
        std::size_t j = 0;
        while (j < L) {
            double next = clock + rng.exponential() / src.rate;
            while (j < L && r_levels[order[j]] < next) {
                double r = r_levels[order[j]];
                std::size_t slot = path * L + order[j];
                ens.values[slot] = big + src.drift * r;
                if (cfg.tilt > 0) ens.weights[slot] = std::exp(-cfg.tilt * big + r * src.psi);
                ++j;
            }
            if (j == L) break;
            clock = next;
            big += src.draw(rng);
        }
    });
    return ens;
}

PathEnsemble sample_E_t(const Kernel& kernel, const SimConfig& cfg, std::span<const double> t_levels,
                        std::span<const double> phi_at_inv_t) {
    validate(kernel, cfg);
    if (cfg.tilt != 0) throw std::invalid_argument("sample_E_t does not support tilting");
    if (phi_at_inv_t.size() != t_levels.size())
        throw std::invalid_argument("sample_E_t: one phi(1/t) value per level is required");
    for (double t : t_levels)
        if (!(t > 0)) throw std::domain_error("sample_E_t: t must be positive");
    const JumpSource src(kernel, cfg);
    const auto order = sort_order(t_levels);
    const std::size_t L = t_levels.size();
    std::vector<double> budget(L);
    for (std::size_t i = 0; i < L; ++i) budget[i] = 1e6 / phi_at_inv_t[i];

    PathEnsemble ens;
    ens.kind = PathEnsemble::Kind::InverseAt;
    ens.levels.assign(t_levels.begin(), t_levels.end());
    ens.n_paths = cfg.n_paths;
    ens.values.assign(cfg.n_paths * L, 0.0);
    ens.overshoot.assign(cfg.n_paths * L, 0.0);
    ens.censored.assign(cfg.n_paths * L, 0);
    ens.seed = cfg.seed;
    ens.eps = cfg.cutoff_eps;

    for_each_path(cfg.n_paths, cfg.backend, [&](std::size_t path) {
        PathRng rng(cfg.seed, path);
        double clock = 0.0, pos = 0.0;
        std::size_t j = 0;
        auto record = [&](double r, double over, bool cens) {
            std::size_t slot = path * L + order[j];
            ens.values[slot] = r;
            ens.overshoot[slot] = over;
            ens.censored[slot] = cens ? 1 : 0;
            ++j;
        };
        while (j < L) {
            double next = clock + rng.exponential() / src.rate;
            // crossings by drift inside [clock, next)
            while (j < L && src.drift > 0 && pos + src.drift * (next - clock) > t_levels[order[j]]) {
                double r = clock + std::max(0.0, t_levels[order[j]] - pos) / src.drift;
                if (r > budget[order[j]]) record(budget[order[j]], 0.0, true);
                else record(r, 0.0, false);
            }
            while (j < L && next > budget[order[j]]) record(budget[order[j]], 0.0, true);
            if (j == L) break;
            pos += src.drift * (next - clock) + src.draw(rng);
            clock = next;
            while (j < L && pos > t_levels[order[j]]) record(clock, pos - t_levels[order[j]], false);
        }
    });
    return ens;
}

TailEstimate tail_from_ensemble(const PathEnsemble& ens, std::size_t level, double t, bool upper) {
    TailEstimate est;
    est.n_paths = ens.n_paths;
    const double n = static_cast<double>(ens.n_paths);
    if (ens.weights.empty()) {
        std::size_t hits = 0;
        for (std::size_t p = 0; p < ens.n_paths; ++p) {
            double v = ens.value(p, level);
            hits += upper ? (v >= t) : (v <= t);
        }
        est.p = static_cast<double>(hits) / n;
        est.se = std::sqrt(est.p * (1.0 - est.p) / n);
        return est;
    }
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t p = 0; p < ens.n_paths; ++p) {
        double v = ens.value(p, level);
        bool hit = upper ? (v >= t) : (v <= t);
        double x = hit ? ens.weight(p, level) : 0.0;
        sum += x;
        sum2 += x * x;
    }
    est.p = sum / n;
    double var = std::max(0.0, (sum2 - n * est.p * est.p) / (n - 1.0));
    est.se = std::sqrt(var / n);
    return est;
}

namespace {

TailEstimate tail_prob(const Kernel& kernel, const SimConfig& cfg, double r, double t, bool upper,
                       std::optional<double> expected) {
    if (!(t > 0)) throw std::domain_error("tail probability: t must be positive");
    double levels[] = {r};
    auto ens = sample_S_at(kernel, cfg, levels);
    auto est = tail_from_ensemble(ens, 0, t, upper);
    if (est.p == 0.0 && expected && *expected > 0 &&
        static_cast<double>(cfg.n_paths) < 10.0 / *expected) {
        std::ostringstream os;
        os << "insufficient paths: expected p ~ " << *expected << " needs at least "
           << std::ceil(10.0 / *expected) << " paths";
        est.diagnostic = os.str();
    }
    return est;
}

}  // namespace

TailEstimate upper_tail_prob(const Kernel& kernel, const SimConfig& cfg, double r, double t,
                             std::optional<double> expected) {
    return tail_prob(kernel, cfg, r, t, true, expected);
}

TailEstimate lower_tail_prob(const Kernel& kernel, const SimConfig& cfg, double r, double t,
                             std::optional<double> expected) {
    return tail_prob(kernel, cfg, r, t, false, expected);
}

double choose_tilt(const Kernel& kernel, double eps, double r, double t) {
    const double end = kernel.support_end();
    if (!std::isfinite(end)) throw std::invalid_argument("choose_tilt: kernel support must be bounded");
    const double drift = kernel.small_jump_mean(eps);
    auto mean = [&](double theta) {
        std::vector<double> pts = per_decade_grid(eps, end, 8);
        if (theta > 0)
            for (double k : {64.0, 16.0, 4.0, 1.0})
                if (end - k / theta > eps) pts.push_back(end - k / theta);
        for (double bp : kernel.breakpoints())
            if (bp > eps && bp < end) pts.push_back(bp);
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        auto f = [&](double s) { return s * std::exp(theta * s) * kernel.levy_density(s); };
        return r * (integrate_panels(f, pts, 1e-10).value + drift);
    };
    if (mean(0.0) >= t) return 0.0;
    double hi = 1.0 / end;
    while (mean(hi) < t) {
        hi *= 2.0;
        if (hi > 1e6 / end) throw RootError("choose_tilt: no tilt reaches the level", 0, hi, 0, 0);
    }
    double lo = hi / 2.0;
    while (lo > 1e-12 / end && mean(lo) >= t) lo /= 2.0;
    return solve_bracketed([&](double theta) { return std::log(mean(theta)) - std::log(t); }, lo, hi, 1e-12);
}

double exact_stable_sample(double beta, double r, std::uint64_t seed, std::uint64_t index) {
    PathRng rng(seed, index);
    double u = kPi * rng.uniform();
    double w = rng.exponential();
    double s1 = std::sin(beta * u) / std::pow(std::sin(u), 1.0 / beta) *
                std::pow(std::sin((1.0 - beta) * u) / w, (1.0 - beta) / beta);
    return std::pow(r, 1.0 / beta) * s1;
}

std::vector<double> exact_stable_ensemble(double beta, double r, std::size_t n, std::uint64_t seed) {
    if (!(beta > 0 && beta < 1)) throw std::domain_error("exact_stable: beta must lie in (0,1)");
    if (!(r > 0)) throw std::domain_error("exact_stable: r must be positive");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = exact_stable_sample(beta, r, seed, i);
    return out;
}

double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        double f = cdf(sample[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(i / na - j / nb));
    }
    return d;
}

double ks_critical_99(std::size_t n) { return 1.6276 / std::sqrt(static_cast<double>(n)); }

double ks_critical_99(std::size_t n, std::size_t m) {
    double a = static_cast<double>(n), b = static_cast<double>(m);
    return 1.6276 * std::sqrt((a + b) / (a * b));
}

std::vector<RefinementRow> eps_refinement(const Kernel& kernel, const SimConfig& cfg, double r, double t) {
    std::vector<RefinementRow> rows;
    SimConfig c = cfg;
    for (int k = 0; k <= cfg.refine_steps; ++k) {
        auto est = upper_tail_prob(kernel, c, r, t);
        rows.push_back({c.cutoff_eps, est.p, est.se});
        c.cutoff_eps /= 2.0;
    }
    return rows;
}

}  // namespace subtail
