#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "subtail/estimates.hpp"
#include "subtail/experiments.hpp"
#include "subtail/heat_kernel.hpp"
#include "subtail/kernel.hpp"
#include "subtail/simulation.hpp"

namespace subtail {

using Json = nlohmann::json;

// Schema violation at a JSON pointer ("/model/alpha").
class SchemaError : public std::runtime_error {
public:
    SchemaError(std::string pointer, const std::string& message)
        : std::runtime_error(pointer + ": " + message), pointer_(std::move(pointer)) {}
    const std::string& pointer() const { return pointer_; }

private:
    std::string pointer_;
};

Json load_json_file(const std::filesystem::path& path);

Kernel parse_kernel(const Json& j, const std::string& pointer = "/kernel");
Json kernel_to_json(const Kernel& kernel);
ModelParams parse_model(const Json& j, const std::string& pointer = "/model");
Geometry parse_geometry(const Json& j, const std::string& pointer = "/model/geometry");
SimConfig parse_sim(const Json& j, const std::string& pointer = "/sim");
EstimateSettings parse_estimate_settings(const Json& j, const std::string& pointer = "/estimate");

struct PhiTableRequest {
    double lambda_min = 1e-3;
    double lambda_max = 1e3;
    std::size_t points = 61;
};

struct TailsRequest {
    std::vector<double> r = {0.1, 1.0};
    std::vector<double> t = {0.5, 1.0, 2.0};
};

struct FundsolRequest {
    Method method = Method::Quadrature;
    std::vector<std::array<double, 3>> points;  // (t, x, y)
};

struct EstimateQuery {
    std::string tag;
    double t = 1.0;
    double x = 0.0;
    double y = 0.0;
};

struct BoundaryRequest {
    std::vector<double> t = {0.5, 1.0};
    double delta_min = 1e-4;
    double delta_max = 1e-1;
    std::size_t points = 7;
    double rel_tol = 1e-6;
};

// Everything one run can read; sections absent from the file keep defaults.
struct RunConfig {
    Kernel kernel = make_caputo(0.5);
    ModelParams model;
    Geometry geometry = Geometry::free_space();
    SimConfig sim;
    EstimateSettings estimate;
    PhiTableRequest phi_table;
    TailsRequest tails;
    FundsolRequest fundsol;
    std::optional<EstimateQuery> query;
    BoundaryRequest boundary;
    // compare
    std::string tag;
    Method method = Method::Quadrature;
    std::size_t resolution = 100;
    double budget = 50.0;
    double max_exp_argument = 50.0;
    GridOptions grid;
    // report: golden case names to run (empty = all)
    std::vector<std::string> report_cases;
};

RunConfig parse_run_config(const Json& j);
CompareCase to_compare_case(const RunConfig& cfg);

}  // namespace subtail
