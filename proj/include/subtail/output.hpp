#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "subtail/comparability.hpp"
#include "subtail/config.hpp"
#include "subtail/experiments.hpp"

namespace subtail {

inline constexpr const char* kToolVersion = "0.1.0";

// 17 significant digits; "inf", "-inf", "nan" for non-finite values.
std::string format_double(double v);
// JSON number, or the format_double string when not finite.
Json json_number(double v);

// Header row, then one row per entry. A non-empty hash adds a leading
// "# manifest <hash>" comment line.
std::string to_csv(const DataTable& table, const std::string& manifest_hash = {});
// Two-space indented, keys sorted, trailing newline.
std::string to_json_text(const Json& j);

// Write to a temporary sibling and rename over the target.
void write_atomic(const std::filesystem::path& path, const std::string& content);

// 64-bit FNV-1a, hex.
std::string fnv1a_hex(const std::string& bytes);

Json to_json(const RatioReport& report);
std::string to_text(const RatioReport& report);
Json to_json(const ConditionReport& report);
Json to_json(const EstimateValue& value);
Json to_json(const CompareResult& result);
DataTable points_table(const CompareResult& result);

struct RunManifest {
    std::string config_path;
    std::string subcommand;
    Json resolved;
    std::uint64_t seed = 0;
    std::string version = kToolVersion;
    std::vector<std::string> outputs;
    double wall_clock_seconds = 0.0;

    // the hash leaves out the wall-clock time
    std::string hash() const;
    Json to_json() const;
};

}  // namespace subtail
