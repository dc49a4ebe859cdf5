#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "subtail/comparability.hpp"
#include "subtail/estimates.hpp"
#include "subtail/heat_kernel.hpp"
#include "subtail/kernel.hpp"
#include "subtail/simulation.hpp"

namespace subtail {

struct DataTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct StudyResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double seconds = 0.0;
    std::string summary;
    std::vector<std::pair<std::string, double>> metrics;
    std::vector<std::string> notes;
    DataTable table;
};

struct StudyOptions {
    std::uint64_t seed = 20240601;
    Backend backend = Backend::OpenMP;
};

struct StudyEntry {
    int id;
    std::string name;
    std::function<StudyResult(const StudyOptions&)> run;
};

// Criteria 1..11; criterion 12 needs the report driver and lives in the
// acceptance binary.
const std::vector<StudyEntry>& acceptance_studies();
StudyResult run_study(int id, const StudyOptions& opt = {});

enum class Method { Quadrature, MonteCarlo };
std::string to_string(Method m);
Method method_from_string(const std::string& name);

struct CompareCase {
    std::string name;
    std::string tag;
    Kernel kernel = make_caputo(0.5);
    ModelParams model;
    Geometry geometry;
    Method method = Method::Quadrature;
    std::size_t resolution = 100;
    double budget = 50.0;
    // grid points whose exponent argument exceeds this are dropped (underflow)
    double max_exp_argument = 50.0;
    SimConfig sim;
    EstimateSettings settings;
    GridOptions grid;
};

struct ComparePoint {
    GridPoint point;
    double observed = 0.0;
    double se = 0.0;
    double predicted = 0.0;
    double exp_argument = 0.0;
    std::string branch;
};

enum class CompareStatus { Pass, Fail, Empty };
std::string to_string(CompareStatus s);

struct CompareResult {
    std::string name;
    std::string tag;
    CompareStatus status = CompareStatus::Empty;
    RegimeGrid grid;
    std::vector<ComparePoint> points;
    RatioReport report;
    std::vector<std::string> notes;
};

// regime_grid -> (quadrature | MC) -> theorem estimate -> two_sided_check.
// Forms with an exponential factor get their constant fitted first.
CompareResult run_compare(const CompareCase& c);

// Frozen cases aggregated by `report`.
std::vector<CompareCase> golden_cases();

}  // namespace subtail
