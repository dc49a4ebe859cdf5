#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "subtail/kernel.hpp"

namespace subtail {

enum class Backend { Serial, OpenMP };

struct SimConfig {
    double cutoff_eps = 1e-4;
    std::size_t n_paths = 10000;
    std::uint64_t seed = 20240601;
    bool compensate = true;
    int refine_steps = 0;
    // Exponential tilt of the jumps above eps (importance sampling for rare
    // upper tails). 0 disables it; > 0 needs a kernel with bounded support.
    double tilt = 0.0;
    Backend backend = Backend::OpenMP;
};

void validate(const Kernel& kernel, const SimConfig& cfg);

// One value per (path, level), row-major by path.
struct PathEnsemble {
    enum class Kind { SubordinatorAt, InverseAt };
    Kind kind = Kind::SubordinatorAt;
    std::vector<double> levels;
    std::size_t n_paths = 0;
    std::vector<double> values;
    std::vector<double> weights;          // likelihood ratios (tilted runs only)
    std::vector<double> overshoot;        // S_{E_t} - t (inverse runs only)
    std::vector<std::uint8_t> censored;   // inverse runs only
    std::uint64_t seed = 0;
    double eps = 0.0;
    double tilt = 0.0;

    double value(std::size_t path, std::size_t level) const { return values[path * levels.size() + level]; }
    double weight(std::size_t path, std::size_t level) const {
        return weights.empty() ? 1.0 : weights[path * levels.size() + level];
    }
    std::vector<double> column(std::size_t level) const;
    std::size_t censored_count(std::size_t level) const;
};

struct TailEstimate {
    double p = 0.0;
    double se = 0.0;
    std::size_t n_paths = 0;
    std::string regime;
    std::string diagnostic;
};

// S_r at every r in r_levels (sorted ascending internally, reported in input order).
PathEnsemble sample_S_at(const Kernel& kernel, const SimConfig& cfg, std::span<const double> r_levels);

// E_t at every t in t_levels. phi_at_inv_t[i] = phi(1/t_levels[i]) sets the
// censoring budget 1e6 / phi(1/t).
PathEnsemble sample_E_t(const Kernel& kernel, const SimConfig& cfg, std::span<const double> t_levels,
                        std::span<const double> phi_at_inv_t);

// Fraction of paths with S_r >= t (weighted by the likelihood ratio when tilted).
TailEstimate tail_from_ensemble(const PathEnsemble& ens, std::size_t level, double t, bool upper);

TailEstimate upper_tail_prob(const Kernel& kernel, const SimConfig& cfg, double r, double t,
                             std::optional<double> expected = std::nullopt);
TailEstimate lower_tail_prob(const Kernel& kernel, const SimConfig& cfg, double r, double t,
                             std::optional<double> expected = std::nullopt);

// Tilt solving r * (mean of the tilted jumps above eps + d_eps) = t; 0 if the
// untilted mean already reaches t.
double choose_tilt(const Kernel& kernel, double eps, double r, double t);

// Exact beta-stable subordinator sample with phi(lam) = lam^beta.
double exact_stable_sample(double beta, double r, std::uint64_t seed, std::uint64_t index);
std::vector<double> exact_stable_ensemble(double beta, double r, std::size_t n, std::uint64_t seed);

// sup |F_n - F|
double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf);
double ks_two_sample(std::vector<double> a, std::vector<double> b);
// asymptotic 99% critical values
double ks_critical_99(std::size_t n);
double ks_critical_99(std::size_t n, std::size_t m);

struct RefinementRow {
    double eps;
    double p;
    double se;
};
// Halve eps refine_steps times starting from cfg.cutoff_eps.
std::vector<RefinementRow> eps_refinement(const Kernel& kernel, const SimConfig& cfg, double r, double t);

}  // namespace subtail
