#include "subtail/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace subtail {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Json json_number(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

std::string to_csv(const DataTable& table, const std::string& manifest_hash) {
    std::string out;
    if (!manifest_hash.empty()) out += "# manifest " + manifest_hash + "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i) out += (i ? "," : "") + table.columns[i];
    out += "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_double(row[i]);
        out += "\n";
    }
    return out;
}

std::string to_json_text(const Json& j) { return j.dump(2) + "\n"; }

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw std::runtime_error("cannot rename " + tmp.string() + ": " + ec.message());
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

namespace {

Json point_json(const GridPoint& p) { return {{"t", json_number(p.t)}, {"x", json_number(p.x)}, {"y", json_number(p.y)}}; }

}  // namespace

Json to_json(const RatioReport& r) {
    Json j;
    j["case"] = r.case_tag;
    j["grid"] = r.grid;
    j["n_points"] = r.n_points;
    j["ratio_min"] = json_number(r.ratio_min);
    j["ratio_max"] = json_number(r.ratio_max);
    j["spread"] = json_number(r.spread);
    j["envelope_min"] = json_number(r.envelope_min);
    j["envelope_max"] = json_number(r.envelope_max);
    j["envelope_spread"] = json_number(r.envelope_spread);
    j["budget"] = json_number(r.budget);
    j["pass"] = r.pass;
    j["failure"] = r.failure;
    Json off = Json::array();
    for (const auto& o : r.offenders)
        off.push_back({{"index", o.index}, {"point", point_json(o.point)}, {"ratio", json_number(o.ratio)}});
    j["offenders"] = off;
    if (r.fit) {
        j["fit"] = {{"c", json_number(r.fit->c)},
                    {"c_low", json_number(r.fit->c_low)},
                    {"c_high", json_number(r.fit->c_high)},
                    {"intercept", json_number(r.fit->intercept)},
                    {"residual", json_number(r.fit->residual)},
                    {"rms_residual", json_number(r.fit->rms_residual)},
                    {"t_stat", json_number(r.fit->t_stat)},
                    {"signal", r.fit->signal},
                    {"diagnostic", r.fit->diagnostic}};
        j["residual_cap"] = json_number(r.residual_cap);
    }
    return j;
}

std::string to_text(const RatioReport& r) {
    std::ostringstream os;
    os << std::left;
    auto row = [&](const std::string& k, const std::string& v) { os << "  " << std::setw(18) << k << v << "\n"; };
    os << "case " << r.case_tag << ": " << (r.pass ? "PASS" : "FAIL") << "\n";
    row("grid", r.grid);
    row("points", std::to_string(r.n_points));
    row("ratio", "[" + format_double(r.ratio_min) + ", " + format_double(r.ratio_max) + "]");
    row("spread", format_double(r.spread));
    row("envelope spread", format_double(r.envelope_spread) + " (budget " + format_double(r.budget) + ")");
    if (r.fit) {
        row("fitted c", format_double(r.fit->c) + " in [" + format_double(r.fit->c_low) + ", " +
                            format_double(r.fit->c_high) + "]");
        row("fit residual", "max " + format_double(r.fit->residual) + ", rms " + format_double(r.fit->rms_residual));
        row("t-stat", format_double(r.fit->t_stat));
        if (!r.fit->diagnostic.empty()) row("fit note", r.fit->diagnostic);
    }
    if (!r.failure.empty()) row("failure", r.failure);
    for (const auto& o : r.offenders)
        row("offender", "ratio " + format_double(o.ratio) + " at t=" + format_double(o.point.t) +
                            " x=" + format_double(o.point.x) + " y=" + format_double(o.point.y));
    return os.str();
}

Json to_json(const ConditionReport& c) {
    Json j;
    j["ker"] = c.ker_ok;
    auto scaling = [](const std::optional<ScalingWitness>& w) -> Json {
        if (!w) return nullptr;
        return {{"horizon", json_number(w->horizon)},
                {"exponent", json_number(w->exponent)},
                {"constant", json_number(w->constant)},
                {"empirical", w->empirical}};
    };
    j["small_time_poly"] = scaling(c.spoly);
    j["large_time_poly"] = scaling(c.lpoly);
    if (c.sub)
        j["subexponential"] = {{"beta", json_number(c.sub->beta)},
                               {"theta", json_number(c.sub->theta)},
                               {"c0", json_number(c.sub->c0)},
                               {"implied", c.sub->implied}};
    else
        j["subexponential"] = nullptr;
    if (c.trunc)
        j["truncation"] = {{"t_f", json_number(c.trunc->t_f)},         {"K", json_number(c.trunc->K)},
                           {"slope_min", json_number(c.trunc->slope_min)}, {"slope_max", json_number(c.trunc->slope_max)},
                           {"delta3", json_number(c.trunc->delta3)},   {"delta3_constant", json_number(c.trunc->delta3_constant)}};
    else
        j["truncation"] = nullptr;
    Json ev = Json::array();
    for (const auto& e : c.evidence)
        ev.push_back({{"name", e.name},
                      {"tests", e.n_tests},
                      {"worst_constant", json_number(e.worst_constant)},
                      {"passed", e.passed}});
    j["evidence"] = ev;
    j["diagnostics"] = c.diagnostics;
    return j;
}

Json to_json(const EstimateValue& v) {
    return {{"case", v.tag},
            {"branch", v.branch},
            {"regime", v.regime},
            {"value", json_number(v.value)},
            {"upper", json_number(v.upper)},
            {"additive", json_number(v.additive)},
            {"prefactor", json_number(v.prefactor)},
            {"exp_argument", json_number(v.exp_argument)}};
}

Json to_json(const CompareResult& r) {
    Json j;
    j["name"] = r.name;
    j["case"] = r.tag;
    j["status"] = to_string(r.status);
    j["report"] = to_json(r.report);
    j["grid_candidates"] = r.grid.candidates;
    j["grid_points"] = r.grid.points.size();
    j["notes"] = r.notes;
    return j;
}

DataTable points_table(const CompareResult& r) {
    DataTable t;
    t.columns = {"t", "x", "y", "observed", "se", "predicted", "exp_argument"};
    for (const auto& p : r.points)
        t.rows.push_back({p.point.t, p.point.x, p.point.y, p.observed, p.se, p.predicted, p.exp_argument});
    return t;
}

Json RunManifest::to_json() const {
    Json j;
    j["config_path"] = config_path;
    j["subcommand"] = subcommand;
    j["resolved"] = resolved;
    j["seed"] = seed;
    j["version"] = version;
    j["outputs"] = outputs;
    j["hash"] = hash();
    j["wall_clock_seconds"] = wall_clock_seconds;
    return j;
}

std::string RunManifest::hash() const {
    Json j;
    j["config_path"] = config_path;
    j["subcommand"] = subcommand;
    j["resolved"] = resolved;
    j["seed"] = seed;
    j["version"] = version;
    j["outputs"] = outputs;
    return fnv1a_hex(j.dump());
}

}  // namespace subtail
