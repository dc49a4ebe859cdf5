#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "subtail/estimates.hpp"

namespace subtail {

struct GridPoint {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
};

struct Offender {
    std::size_t index = 0;
    GridPoint point;
    double ratio = 0.0;
};

// Fit of log(observed / structural) = a - c X.
struct ExpFit {
    double c = 0.0;
    double c_low = 0.0;
    double c_high = 0.0;
    double intercept = 0.0;
    double residual = 0.0;      // max |deviation| after the fit, log units
    double rms_residual = 0.0;  // root mean square deviation, log units
    double t_stat = 0.0;
    bool signal = false;
    std::string diagnostic;
};

struct RatioReport {
    std::string case_tag;
    std::string grid;
    std::size_t n_points = 0;
    double ratio_min = 0.0;
    double ratio_max = 0.0;
    double spread = 0.0;
    // observed +- 3 se divided by predicted
    double envelope_min = 0.0;
    double envelope_max = 0.0;
    double envelope_spread = 0.0;
    std::vector<Offender> offenders;  // lowest and highest ratios
    double budget = 0.0;
    bool pass = false;
    std::string failure;
    std::optional<ExpFit> fit;
    double residual_cap = 0.0;
};

// se may be empty (exact observations). points, if given, label offenders.
RatioReport two_sided_check(std::span<const double> observed, std::span<const double> se,
                            std::span<const double> predicted, double spread_budget,
                            std::span<const GridPoint> points = {}, std::string case_tag = {});

// log_ratio = log(observed / structural part); log_se (optional) is the
// standard error of each log ratio and sets the c_low / c_high envelope.
ExpFit exp_constant_fit(std::span<const double> log_ratio, std::span<const double> X,
                        std::span<const double> log_se = {});

struct RegimeGrid {
    std::string tag;
    std::vector<GridPoint> points;
    std::size_t candidates = 0;
    std::size_t requested = 0;
    std::string note;  // set when fewer than requested points were admissible
};

struct GridOptions {
    double t_lo = 0.0;  // 0 picks a range from the theorem
    double t_hi = 0.0;
    int refinements = 4;
};

// Log-spaced (t, x, y) candidates filtered by the tag's regime predicate
// (margin from the library settings), refined until `resolution` points pass.
RegimeGrid regime_grid(const EstimateLibrary& lib, const std::string& tag, std::size_t resolution,
                       const GridOptions& opt = {});
// Fixed candidate grid with `side` points per axis, filtered.
RegimeGrid regime_grid_side(const EstimateLibrary& lib, const std::string& tag, std::size_t side,
                            const GridOptions& opt = {});

}  // namespace subtail
