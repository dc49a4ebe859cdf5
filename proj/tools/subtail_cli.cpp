// subtail: batch front-end for tail, fundamental-solution and estimate runs.
#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include "subtail/bernstein.hpp"
#include "subtail/config.hpp"
#include "subtail/estimates.hpp"
#include "subtail/experiments.hpp"
#include "subtail/fundamental.hpp"
#include "subtail/output.hpp"
#include "subtail/tail_theory.hpp"

using namespace subtail;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kBudget = 1, kSchema = 2, kRegime = 3, kInternal = 4 };

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "out";
    std::string case_tag;
    std::optional<std::size_t> paths;
    std::optional<double> budget;
};

Json geometry_json(const Geometry& g) { return {{"kind", to_string(g.kind())}, {"length", g.length()}}; }

Json resolved_json(const RunConfig& c, const std::string& sub) {
    Json j;
    j["kernel"] = kernel_to_json(c.kernel);
    const auto& m = c.model;
    j["model"] = {{"family", to_string(m.family)}, {"alpha", m.alpha},       {"d", m.d},
                  {"gamma", m.gamma},              {"lambda", m.lambda},     {"k", m.k},
                  {"psi_exponent", m.psi_exponent}, {"exp_constant", m.exp_constant},
                  {"lambda_rate", m.lambda_rate},  {"geometry", geometry_json(c.geometry)}};
    j["sim"] = {{"eps", c.sim.cutoff_eps},
                {"paths", c.sim.n_paths},
                {"seed", c.sim.seed},
                {"tilt", c.sim.tilt},
                {"backend", c.sim.backend == Backend::Serial ? "serial" : "openmp"}};
    j["estimate"] = {{"margin", c.estimate.margin},
                     {"horizon", c.estimate.horizon},
                     {"sub_L1", c.estimate.sub_L1},
                     {"sub_L2", c.estimate.sub_L2}};
    if (sub == "compare")
        j["compare"] = {{"case", c.tag},         {"method", to_string(c.method)},
                        {"resolution", c.resolution}, {"budget", c.budget},
                        {"max_exp_argument", c.max_exp_argument}};
    if (sub == "estimate" && c.query)
        j["query"] = {{"case", c.query->tag}, {"t", c.query->t}, {"x", c.query->x}, {"y", c.query->y}};
    if (sub == "report") j["report"] = {{"cases", c.report_cases}};
    return j;
}

class Run {
public:
    Run(std::string sub, const Flags& flags, RunConfig cfg) : sub_(std::move(sub)), flags_(flags), cfg_(std::move(cfg)) {
        manifest_.config_path = flags.config;
        manifest_.subcommand = sub_;
        manifest_.seed = cfg_.sim.seed;
        manifest_.resolved = resolved_json(cfg_, sub_);
    }
    const RunConfig& cfg() const { return cfg_; }
    fs::path path(const std::string& name) const { return fs::path(flags_.out) / name; }
    // register outputs before writing so every file can cite the hash
    void declare(const std::vector<std::string>& names) {
        for (const auto& n : names) manifest_.outputs.push_back(n);
    }
    std::string hash() const { return manifest_.hash(); }
    void write(const std::string& name, const std::string& content) { write_atomic(path(name), content); }
    void write_json(const std::string& name, Json j) {
        j["manifest_hash"] = hash();
        write(name, to_json_text(j));
    }
    void write_csv(const std::string& name, const DataTable& t) { write(name, to_csv(t, hash())); }
    void finish(double seconds) {
        manifest_.wall_clock_seconds = seconds;
        write("manifest.json", to_json_text(manifest_.to_json()));
    }

private:
    std::string sub_;
    Flags flags_;
    RunConfig cfg_;
    RunManifest manifest_;
};

RunConfig load_config(const Flags& flags) {
    RunConfig cfg = flags.config.empty() ? RunConfig{} : parse_run_config(load_json_file(flags.config));
    if (flags.seed) cfg.sim.seed = *flags.seed;
    if (flags.paths) cfg.sim.n_paths = *flags.paths;
    if (flags.budget) cfg.budget = *flags.budget;
    if (!flags.case_tag.empty()) {
        cfg.tag = flags.case_tag;
        if (cfg.query) cfg.query->tag = flags.case_tag;
    }
    return cfg;
}

int cmd_phi_table(Run& run) {
    const auto& c = run.cfg().phi_table;
    BernsteinTable tab(run.cfg().kernel);
    DataTable t;
    t.columns = {"lambda", "phi", "phi_prime", "H", "b"};
    for (double lam : log_grid(c.lambda_min, c.lambda_max, c.points))
        t.rows.push_back({lam, tab.phi(lam), tab.phi_prime(lam), tab.H(lam), tab.b(lam)});
    run.declare({"phi_table.csv"});
    run.write_csv("phi_table.csv", t);
    return kOk;
}

int cmd_conditions(Run& run) {
    const ConditionReport rep = check_conditions(run.cfg().kernel);
    Json j = to_json(rep);
    j["kernel"] = kernel_to_json(run.cfg().kernel);
    run.declare({"conditions.json"});
    run.write_json("conditions.json", j);
    std::cout << to_json_text(j);
    return kOk;
}

int cmd_tails(Run& run) {
    const auto& cfg = run.cfg();
    BernsteinTable tab(cfg.kernel);
    TailTheory theory(tab, check_conditions(cfg.kernel));
    std::ostringstream csv;
    run.declare({"tails.csv"});
    csv << "# manifest " << run.hash() << "\n";
    csv << "r,t,upper,upper_se,lower,lower_se,regime,form_value\n";
    const PathEnsemble ens = sample_S_at(cfg.kernel, cfg.sim, cfg.tails.r);
    for (std::size_t i = 0; i < cfg.tails.r.size(); ++i) {
        for (double t : cfg.tails.t) {
            const double r = cfg.tails.r[i];
            const TailEstimate up = tail_from_ensemble(ens, i, t, true);
            const TailEstimate lo = tail_from_ensemble(ens, i, t, false);
            const UpperForm form = theory.upper_bound_form(r, t);
            csv << format_double(r) << ',' << format_double(t) << ',' << format_double(up.p) << ','
                << format_double(up.se) << ',' << format_double(lo.p) << ',' << format_double(lo.se) << ','
                << to_string(theory.classify(r, t).tag) << ',' << format_double(form.value) << "\n";
        }
    }
    run.write("tails.csv", csv.str());
    return kOk;
}

int cmd_fundsol(Run& run) {
    const auto& cfg = run.cfg();
    if (cfg.fundsol.points.empty()) throw SchemaError("/fundsol/points", "missing");
    BernsteinTable tab(cfg.kernel);
    HKModel model(cfg.model, cfg.geometry);
    std::ostringstream csv;
    run.declare({"fundsol.csv"});
    csv << "# manifest " << run.hash() << "\n";
    csv << "t,x,y,p,se,method\n";
    std::map<double, std::unique_ptr<TimeChangeDensity>> dens;
    for (const auto& [t, x, y] : cfg.fundsol.points) {
        if (!cfg.geometry.contains(x)) throw SchemaError("/fundsol/points", "x = " + format_double(x) + " is outside the domain");
        if (!cfg.geometry.contains(y)) throw SchemaError("/fundsol/points", "y = " + format_double(y) + " is outside the domain");
        double p = 0.0, se = 0.0;
        if (cfg.fundsol.method == Method::Quadrature) {
            auto& d = dens[t];
            if (!d) d = make_time_change_density(cfg.kernel, t, cfg.sim, tab);
            p = p_quadrature(model, *d, x, y, d->closed_form() ? 1e-8 : 1e-2).value;
        } else {
            const McValue m = p_mc(model, cfg.kernel, tab, cfg.sim, t, x, y);
            p = m.value;
            se = m.se;
        }
        csv << format_double(t) << ',' << format_double(x) << ',' << format_double(y) << ',' << format_double(p) << ','
            << format_double(se) << ',' << to_string(cfg.fundsol.method) << "\n";
    }
    run.write("fundsol.csv", csv.str());
    return kOk;
}

int cmd_estimate(Run& run) {
    const auto& cfg = run.cfg();
    if (!cfg.query) throw SchemaError("/query", "missing");
    BernsteinTable tab(cfg.kernel);
    HKModel model(cfg.model, cfg.geometry);
    EstimateLibrary lib(model, tab, check_conditions(cfg.kernel), cfg.estimate);
    run.declare({"estimate.json"});
    try {
        const EstimateValue v = lib.evaluate(cfg.query->tag, cfg.query->t, cfg.query->x, cfg.query->y);
        const Json j = to_json(v);
        run.write_json("estimate.json", j);
        std::cout << to_json_text(j);
        return kOk;
    } catch (const RegimeError& e) {
        Json j = {{"case", cfg.query->tag}, {"error", e.what()}, {"constraints", e.regime.constraints}};
        run.write_json("estimate.json", j);
        std::cout << to_json_text(j);
        return kRegime;
    }
}

int cmd_compare(Run& run) {
    const auto& cfg = run.cfg();
    if (cfg.tag.empty()) throw SchemaError("/compare/case", "missing (or pass --case)");
    const CompareResult r = run_compare(to_compare_case(cfg));
    run.declare({"compare.json", "compare.txt", "compare_points.csv"});
    run.write_json("compare.json", to_json(r));
    std::string text = to_text(r.report);
    for (const auto& n : r.notes) text += "  note              " + n + "\n";
    run.write("compare.txt", text);
    run.write_csv("compare_points.csv", points_table(r));
    std::cout << text;
    if (r.status == CompareStatus::Empty) return kRegime;
    return r.status == CompareStatus::Pass ? kOk : kBudget;
}

int cmd_boundary(Run& run) {
    const auto& cfg = run.cfg();
    const auto& b = cfg.boundary;
    BernsteinTable tab(cfg.kernel);
    HKModel model(cfg.model, cfg.geometry);
    const double exponent = model.alpha() * model.estimate_class().gamma;
    DataTable t;
    t.columns = {"t", "delta", "u", "u_error", "ratio"};
    Json bands = Json::object();
    const auto one = [](double) { return 1.0; };
    for (double time : b.t) {
        auto dens = make_time_change_density(cfg.kernel, time, cfg.sim, tab);
        const auto deltas = log_grid(b.delta_min, b.delta_max, b.points);
        std::vector<SolutionValue> us(deltas.size());
        std::vector<double> xs(deltas.size());
        for (std::size_t i = 0; i < deltas.size(); ++i) {
            // a point at distance delta from the left end (or from the boundary)
            xs[i] = cfg.geometry.kind() == GeometryKind::Exterior ? 1.0 + deltas[i] : deltas[i];
            if (!cfg.geometry.contains(xs[i])) throw SchemaError("/boundary", "delta sweep leaves the domain");
        }
#pragma omp parallel for schedule(dynamic)
        for (std::size_t i = 0; i < deltas.size(); ++i) {
            SolveOptions so;
            so.rel_tol = b.rel_tol;
            us[i] = solve_u(model, *dens, xs[i], one, so);
        }
        double lo = kInf, hi = 0.0;
        for (std::size_t i = 0; i < deltas.size(); ++i) {
            const double ratio = us[i].value / std::pow(deltas[i], exponent);
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
            t.rows.push_back({time, deltas[i], us[i].value, us[i].error, ratio});
        }
        bands[format_double(time)] = json_number(hi / lo);
    }
    run.declare({"boundary.csv", "boundary.json"});
    run.write_csv("boundary.csv", t);
    run.write_json("boundary.json", {{"exponent", exponent}, {"band", bands}});
    std::cout << to_csv(t);
    return kOk;
}

int cmd_report(Run& run, const Flags& flags) {
    const auto& cfg = run.cfg();
    std::vector<CompareCase> cases;
    for (auto& c : golden_cases()) {
        if (!cfg.report_cases.empty() &&
            std::find(cfg.report_cases.begin(), cfg.report_cases.end(), c.name) == cfg.report_cases.end())
            continue;
        if (!flags.case_tag.empty() && c.tag != flags.case_tag && c.name != flags.case_tag) continue;
        if (flags.seed) c.sim.seed = *flags.seed;
        if (flags.paths) c.sim.n_paths = *flags.paths;
        if (flags.budget) c.budget = *flags.budget;
        cases.push_back(std::move(c));
    }
    if (cases.empty()) throw SchemaError("/report/cases", "no golden case selected");
    std::vector<std::string> names = {"report.json", "report.txt"};
    for (const auto& c : cases) names.push_back("cases/" + c.name + ".csv");
    run.declare(names);

    Json rows = Json::array();
    Json matrix = Json::object();
    std::ostringstream txt;
    txt << std::left;
    bool all_pass = true;
    for (const auto& c : cases) {
        std::cerr << "report: " << c.name << " (" << c.tag << ")\n";
        const CompareResult r = run_compare(c);
        run.write_csv("cases/" + c.name + ".csv", points_table(r));
        Json row = to_json(r);
        row["method"] = to_string(c.method);
        row["family"] = to_string(c.model.family);
        row["kernel"] = kernel_to_json(c.kernel);
        rows.push_back(row);
        matrix[theorem_of(c.tag)][c.name] = to_string(r.status);
        all_pass = all_pass && r.status == CompareStatus::Pass;
        char line[256];
        std::snprintf(line, sizeof line, "%-28s %-18s %-6s %6zu  spread %-12s budget %s\n", c.name.c_str(),
                      c.tag.c_str(), to_string(r.status).c_str(), r.report.n_points,
                      format_double(r.report.envelope_spread).substr(0, 10).c_str(),
                      format_double(r.report.budget).c_str());
        txt << line;
    }
    run.write_json("report.json", {{"cases", rows}, {"matrix", matrix}, {"all_pass", all_pass}});
    run.write("report.txt", txt.str());
    std::cout << txt.str();
    return all_pass ? kOk : kBudget;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"subordinator tails, fundamental solutions and heat kernel estimates"};
    app.require_subcommand(1);
    Flags flags;
    const char* subs[][2] = {{"phi-table", "tabulate phi, phi', H and b"},
                             {"conditions", "check the kernel conditions"},
                             {"tails", "Monte Carlo tail probabilities of S_r"},
                             {"fundsol", "fundamental solution at given points"},
                             {"estimate", "evaluate one theorem estimate"},
                             {"compare", "compare the fundamental solution with a theorem estimate"},
                             {"boundary", "boundary decay sweep of u(t, x) with f = 1"},
                             {"report", "run the golden comparison suite"}};
    std::map<std::string, CLI::App*> cmds;
    for (auto& [name, help] : subs) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", flags.config, "JSON config file")->check(CLI::ExistingFile);
        sub->add_option("--seed", flags.seed, "random seed");
        sub->add_option("--out", flags.out, "output directory");
        sub->add_option("--case", flags.case_tag, "estimate case tag");
        sub->add_option("--paths", flags.paths, "number of Monte Carlo paths")
            ->check(CLI::Range(std::size_t{100}, std::numeric_limits<std::size_t>::max()));
        sub->add_option("--budget", flags.budget, "ratio spread budget");
        cmds[name] = sub;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kSchema;
    }
    const auto t0 = std::chrono::steady_clock::now();
    std::string sub;
    for (auto& [name, cmd] : cmds)
        if (cmd->parsed()) sub = name;
    try {
        Run run(sub, flags, load_config(flags));
        int code = kOk;
        if (sub == "phi-table") code = cmd_phi_table(run);
        else if (sub == "conditions") code = cmd_conditions(run);
        else if (sub == "tails") code = cmd_tails(run);
        else if (sub == "fundsol") code = cmd_fundsol(run);
        else if (sub == "estimate") code = cmd_estimate(run);
        else if (sub == "compare") code = cmd_compare(run);
        else if (sub == "boundary") code = cmd_boundary(run);
        else code = cmd_report(run, flags);
        run.finish(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        return code;
    } catch (const SchemaError& e) {
        std::cout << to_json_text({{"error", "schema"}, {"pointer", e.pointer()}, {"message", e.what()}});
        return kSchema;
    } catch (const RegimeError& e) {
        std::cout << to_json_text({{"error", "regime"}, {"message", e.what()}});
        return kRegime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInternal;
    }
}
