#include "subtail/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace subtail {

namespace {

std::string child(const std::string& pointer, const std::string& key) { return pointer + "/" + key; }

void require_object(const Json& j, const std::string& pointer) {
    if (!j.is_object()) throw SchemaError(pointer, "expected an object");
}

void allow_keys(const Json& j, const std::string& pointer, std::initializer_list<const char*> keys) {
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) throw SchemaError(child(pointer, it.key()), "unknown key");
}

double number(const Json& j, const std::string& pointer) {
    if (!j.is_number()) throw SchemaError(pointer, "expected a number");
    return j.get<double>();
}

double positive(const Json& j, const std::string& pointer) {
    const double v = number(j, pointer);
    if (!(v > 0)) throw SchemaError(pointer, "expected a positive number");
    return v;
}

std::uint64_t unsigned_int(const Json& j, const std::string& pointer) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
        throw SchemaError(pointer, "expected a non-negative integer");
    return j.get<std::uint64_t>();
}

std::string text(const Json& j, const std::string& pointer) {
    if (!j.is_string()) throw SchemaError(pointer, "expected a string");
    return j.get<std::string>();
}

std::vector<double> number_list(const Json& j, const std::string& pointer, bool require_positive) {
    if (!j.is_array() || j.empty()) throw SchemaError(pointer, "expected a non-empty array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = child(pointer, std::to_string(i));
        out.push_back(require_positive ? positive(j[i], p) : number(j[i], p));
    }
    return out;
}

template <class F>
void if_present(const Json& j, const char* key, const std::string& pointer, F&& f) {
    if (j.contains(key)) f(j.at(key), child(pointer, key));
}

}  // namespace

Json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("", "cannot open config file " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw SchemaError("", std::string("invalid JSON: ") + e.what());
    }
}

Kernel parse_kernel(const Json& j, const std::string& pointer) {
    require_object(j, pointer);
    if (!j.contains("kind")) throw SchemaError(child(pointer, "kind"), "missing");
    const std::string kind = text(j.at("kind"), child(pointer, "kind"));
    auto get = [&](const char* key, double fallback) {
        return j.contains(key) ? number(j.at(key), child(pointer, key)) : fallback;
    };
    // exponent in (0, 1), or (0, 1] when closed
    auto exponent = [&](const char* key, double fallback, bool closed = false) {
        const double v = get(key, fallback);
        if (!(v > 0.0 && (v < 1.0 || (closed && v == 1.0))))
            throw SchemaError(child(pointer, key), closed ? "must lie in (0, 1]" : "must lie in (0, 1)");
        return v;
    };
    auto positive_field = [&](const char* key, double fallback) {
        const double v = get(key, fallback);
        if (!(v > 0.0)) throw SchemaError(child(pointer, key), "must be positive");
        return v;
    };
    try {
        if (kind == "caputo") {
            allow_keys(j, pointer, {"kind", "beta"});
            return make_caputo(exponent("beta", 0.5));
        }
        if (kind == "power") {
            allow_keys(j, pointer, {"kind", "beta", "scale"});
            return Kernel{PowerKernel{exponent("beta", 0.5), positive_field("scale", 1.0)}};
        }
        if (kind == "truncated") {
            allow_keys(j, pointer, {"kind", "beta", "delta", "scale"});
            return Kernel{TruncatedKernel{exponent("beta", 0.5), positive_field("delta", 1.0), positive_field("scale", 1.0)}};
        }
        if (kind == "subexp") {
            allow_keys(j, pointer, {"kind", "beta", "theta", "c0", "small_beta"});
            return Kernel{SubexpKernel{exponent("beta", 0.5, true), positive_field("theta", 1.0), positive_field("c0", 1.0),
                                      exponent("small_beta", 0.5)}};
        }
        if (kind == "distributed") {
            allow_keys(j, pointer, {"kind", "terms"});
            const std::string tp = child(pointer, "terms");
            if (!j.contains("terms") || !j.at("terms").is_array() || j.at("terms").empty())
                throw SchemaError(tp, "expected a non-empty array of {beta, kappa}");
            DistributedKernel dk;
            for (std::size_t i = 0; i < j.at("terms").size(); ++i) {
                const Json& term = j.at("terms")[i];
                const std::string p = child(tp, std::to_string(i));
                require_object(term, p);
                allow_keys(term, p, {"beta", "kappa"});
                if (!term.contains("beta") || !term.contains("kappa")) throw SchemaError(p, "needs beta and kappa");
                dk.weights.push_back({number(term.at("beta"), child(p, "beta")), number(term.at("kappa"), child(p, "kappa"))});
            }
            return Kernel{std::move(dk)};
        }
        if (kind == "tabulated") {
            allow_keys(j, pointer, {"kind", "knots", "tail", "tail_rate"});
            const std::string kp = child(pointer, "knots");
            if (!j.contains("knots") || !j.at("knots").is_array()) throw SchemaError(kp, "expected an array of [s, w]");
            TabulatedKernel tk;
            for (std::size_t i = 0; i < j.at("knots").size(); ++i) {
                const Json& knot = j.at("knots")[i];
                const std::string p = child(kp, std::to_string(i));
                if (!knot.is_array() || knot.size() != 2) throw SchemaError(p, "expected [s, w]");
                tk.knots.push_back({number(knot[0], child(p, "0")), number(knot[1], child(p, "1"))});
            }
            if (j.contains("tail")) {
                const std::string t = text(j.at("tail"), child(pointer, "tail"));
                if (t == "power") tk.tail = TailClass::Power;
                else if (t == "exponential") tk.tail = TailClass::Exponential;
                else if (t == "truncated") tk.tail = TailClass::Truncated;
                else throw SchemaError(child(pointer, "tail"), "expected power, exponential or truncated");
            }
            tk.tail_rate = get("tail_rate", 0.0);
            return Kernel{std::move(tk)};
        }
    } catch (const SchemaError&) {
        throw;
    } catch (const std::exception& e) {
        throw SchemaError(pointer, e.what());
    }
    throw SchemaError(child(pointer, "kind"), "unknown kernel kind '" + kind + "'");
}

Json kernel_to_json(const Kernel& kernel) {
    return std::visit(
        [](const auto& k) -> Json {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, PowerKernel>) {
                return {{"kind", "power"}, {"beta", k.beta}, {"scale", k.scale}};
            } else if constexpr (std::is_same_v<K, TruncatedKernel>) {
                return {{"kind", "truncated"}, {"beta", k.beta}, {"delta", k.delta}, {"scale", k.scale}};
            } else if constexpr (std::is_same_v<K, SubexpKernel>) {
                return {{"kind", "subexp"}, {"beta", k.beta}, {"theta", k.theta}, {"c0", k.c0}, {"small_beta", k.small_beta}};
            } else if constexpr (std::is_same_v<K, DistributedKernel>) {
                Json terms = Json::array();
                for (const auto& t : k.weights) terms.push_back({{"beta", t.beta}, {"kappa", t.kappa}});
                return {{"kind", "distributed"}, {"terms", terms}};
            } else {
                Json knots = Json::array();
                for (const auto& kn : k.knots) knots.push_back({kn.s, kn.w});
                const char* tail = k.tail == TailClass::Power ? "power" : k.tail == TailClass::Exponential ? "exponential" : "truncated";
                return {{"kind", "tabulated"}, {"knots", knots}, {"tail", tail}, {"tail_rate", k.tail_rate}};
            }
        },
        kernel.spec());
}

Geometry parse_geometry(const Json& j, const std::string& pointer) {
    require_object(j, pointer);
    allow_keys(j, pointer, {"kind", "length"});
    if (!j.contains("kind")) throw SchemaError(child(pointer, "kind"), "missing");
    GeometryKind kind;
    try {
        kind = geometry_kind_from_string(text(j.at("kind"), child(pointer, "kind")));
    } catch (const SchemaError&) {
        throw;
    } catch (const std::exception& e) {
        throw SchemaError(child(pointer, "kind"), e.what());
    }
    double length = 1.0;
    if_present(j, "length", pointer, [&](const Json& v, const std::string& p) { length = positive(v, p); });
    return Geometry(kind, length);
}

ModelParams parse_model(const Json& j, const std::string& pointer) {
    require_object(j, pointer);
    allow_keys(j, pointer,
               {"family", "alpha", "d", "gamma", "lambda", "k", "psi_exponent", "exp_constant", "lambda_rate", "geometry"});
    ModelParams mp;
    if_present(j, "family", pointer, [&](const Json& v, const std::string& p) {
        try {
            mp.family = family_from_string(text(v, p));
        } catch (const SchemaError&) {
            throw;
        } catch (const std::exception& e) {
            throw SchemaError(p, e.what());
        }
    });
    if_present(j, "alpha", pointer, [&](const Json& v, const std::string& p) {
        mp.alpha = positive(v, p);
        if (mp.alpha > 2.0) throw SchemaError(p, "alpha must lie in (0, 2]");
    });
    if_present(j, "d", pointer, [&](const Json& v, const std::string& p) { mp.d = positive(v, p); });
    if_present(j, "gamma", pointer, [&](const Json& v, const std::string& p) {
        mp.gamma = number(v, p);
        if (mp.gamma < 0 || mp.gamma > 1) throw SchemaError(p, "gamma must lie in [0, 1]");
    });
    if_present(j, "lambda", pointer, [&](const Json& v, const std::string& p) {
        mp.lambda = number(v, p);
        if (mp.lambda < 0) throw SchemaError(p, "lambda must be non-negative");
    });
    if_present(j, "k", pointer, [&](const Json& v, const std::string& p) {
        const auto k = unsigned_int(v, p);
        if (k != 1 && k != 2) throw SchemaError(p, "k must be 1 or 2");
        mp.k = static_cast<int>(k);
    });
    if_present(j, "psi_exponent", pointer, [&](const Json& v, const std::string& p) { mp.psi_exponent = number(v, p); });
    if_present(j, "exp_constant", pointer, [&](const Json& v, const std::string& p) { mp.exp_constant = positive(v, p); });
    if_present(j, "lambda_rate", pointer, [&](const Json& v, const std::string& p) { mp.lambda_rate = number(v, p); });
    return mp;
}

SimConfig parse_sim(const Json& j, const std::string& pointer) {
    require_object(j, pointer);
    allow_keys(j, pointer, {"eps", "paths", "seed", "tilt", "backend", "refine_steps"});
    SimConfig cfg;
    if_present(j, "eps", pointer, [&](const Json& v, const std::string& p) { cfg.cutoff_eps = positive(v, p); });
    if_present(j, "paths", pointer, [&](const Json& v, const std::string& p) {
        cfg.n_paths = unsigned_int(v, p);
        if (cfg.n_paths < 100) throw SchemaError(p, "need at least 100 paths");
    });
    if_present(j, "seed", pointer, [&](const Json& v, const std::string& p) { cfg.seed = unsigned_int(v, p); });
    if_present(j, "tilt", pointer, [&](const Json& v, const std::string& p) {
        cfg.tilt = number(v, p);
        if (cfg.tilt < 0) throw SchemaError(p, "tilt must be non-negative");
    });
    if_present(j, "refine_steps", pointer,
               [&](const Json& v, const std::string& p) { cfg.refine_steps = static_cast<int>(unsigned_int(v, p)); });
    if_present(j, "backend", pointer, [&](const Json& v, const std::string& p) {
        const std::string b = text(v, p);
        if (b == "serial") cfg.backend = Backend::Serial;
        else if (b == "openmp") cfg.backend = Backend::OpenMP;
        else throw SchemaError(p, "expected serial or openmp");
    });
    return cfg;
}

EstimateSettings parse_estimate_settings(const Json& j, const std::string& pointer) {
    require_object(j, pointer);
    allow_keys(j, pointer, {"margin", "horizon", "sub_L1", "sub_L2"});
    EstimateSettings s;
    if_present(j, "margin", pointer, [&](const Json& v, const std::string& p) {
        s.margin = number(v, p);
        if (!(s.margin >= 1)) throw SchemaError(p, "margin must be >= 1");
    });
    if_present(j, "horizon", pointer, [&](const Json& v, const std::string& p) { s.horizon = positive(v, p); });
    if_present(j, "sub_L1", pointer, [&](const Json& v, const std::string& p) { s.sub_L1 = positive(v, p); });
    if_present(j, "sub_L2", pointer, [&](const Json& v, const std::string& p) { s.sub_L2 = positive(v, p); });
    return s;
}

RunConfig parse_run_config(const Json& j) {
    require_object(j, "");
    allow_keys(j, "", {"kernel", "model", "sim", "estimate", "phi_table", "tails", "fundsol", "query", "boundary",
                       "compare", "report"});
    RunConfig cfg;
    if_present(j, "kernel", "", [&](const Json& v, const std::string& p) { cfg.kernel = parse_kernel(v, p); });
    if_present(j, "model", "", [&](const Json& v, const std::string& p) {
        cfg.model = parse_model(v, p);
        if (v.contains("geometry")) cfg.geometry = parse_geometry(v.at("geometry"), child(p, "geometry"));
    });
    if_present(j, "sim", "", [&](const Json& v, const std::string& p) { cfg.sim = parse_sim(v, p); });
    if_present(j, "estimate", "", [&](const Json& v, const std::string& p) { cfg.estimate = parse_estimate_settings(v, p); });
    if_present(j, "phi_table", "", [&](const Json& v, const std::string& p) {
        require_object(v, p);
        allow_keys(v, p, {"lambda_min", "lambda_max", "points"});
        if_present(v, "lambda_min", p, [&](const Json& x, const std::string& q) { cfg.phi_table.lambda_min = positive(x, q); });
        if_present(v, "lambda_max", p, [&](const Json& x, const std::string& q) { cfg.phi_table.lambda_max = positive(x, q); });
        if_present(v, "points", p, [&](const Json& x, const std::string& q) {
            cfg.phi_table.points = unsigned_int(x, q);
            if (cfg.phi_table.points < 2) throw SchemaError(q, "need at least 2 points");
        });
        if (cfg.phi_table.lambda_min >= cfg.phi_table.lambda_max) throw SchemaError(p, "lambda_min must be below lambda_max");
    });
    if_present(j, "tails", "", [&](const Json& v, const std::string& p) {
        require_object(v, p);
        allow_keys(v, p, {"r", "t"});
        if_present(v, "r", p, [&](const Json& x, const std::string& q) { cfg.tails.r = number_list(x, q, true); });
        if_present(v, "t", p, [&](const Json& x, const std::string& q) { cfg.tails.t = number_list(x, q, true); });
    });
    if_present(j, "fundsol", "", [&](const Json& v, const std::string& p) {
        require_object(v, p);
        allow_keys(v, p, {"method", "points"});
        if_present(v, "method", p, [&](const Json& x, const std::string& q) {
            try {
                cfg.fundsol.method = method_from_string(text(x, q));
            } catch (const SchemaError&) {
                throw;
            } catch (const std::exception& e) {
                throw SchemaError(q, e.what());
            }
        });
        if_present(v, "points", p, [&](const Json& x, const std::string& q) {
            if (!x.is_array() || x.empty()) throw SchemaError(q, "expected a non-empty array of [t, x, y]");
            for (std::size_t i = 0; i < x.size(); ++i) {
                const std::string pi = child(q, std::to_string(i));
                if (!x[i].is_array() || x[i].size() != 3) throw SchemaError(pi, "expected [t, x, y]");
                cfg.fundsol.points.push_back({positive(x[i][0], child(pi, "0")), number(x[i][1], child(pi, "1")),
                                              number(x[i][2], child(pi, "2"))});
            }
        });
    });
    if_present(j, "query", "", [&](const Json& v, const std::string& p) {
        require_object(v, p);
        allow_keys(v, p, {"case", "t", "x", "y"});
        EstimateQuery q;
        if (!v.contains("case")) throw SchemaError(child(p, "case"), "missing");
        q.tag = text(v.at("case"), child(p, "case"));
        if_present(v, "t", p, [&](const Json& x, const std::string& s) { q.t = positive(x, s); });
        if_present(v, "x", p, [&](const Json& x, const std::string& s) { q.x = number(x, s); });
        if_present(v, "y", p, [&](const Json& x, const std::string& s) { q.y = number(x, s); });
        cfg.query = q;
    });
    if_present(j, "boundary", "", [&](const Json& v, const std::string& p) {
        require_object(v, p);
        allow_keys(v, p, {"t", "delta_min", "delta_max", "points", "rel_tol"});
        if_present(v, "t", p, [&](const Json& x, const std::string& q) { cfg.boundary.t = number_list(x, q, true); });
        if_present(v, "delta_min", p, [&](const Json& x, const std::string& q) { cfg.boundary.delta_min = positive(x, q); });
        if_present(v, "delta_max", p, [&](const Json& x, const std::string& q) { cfg.boundary.delta_max = positive(x, q); });
        if_present(v, "points", p, [&](const Json& x, const std::string& q) {
            cfg.boundary.points = unsigned_int(x, q);
            if (cfg.boundary.points < 2) throw SchemaError(q, "need at least 2 points");
        });
        if_present(v, "rel_tol", p, [&](const Json& x, const std::string& q) { cfg.boundary.rel_tol = positive(x, q); });
    });
    if_present(j, "compare", "", [&](const Json& v, const std::string& p) {
        require_object(v, p);
        allow_keys(v, p, {"case", "method", "resolution", "budget", "max_exp_argument", "t_range"});
        if_present(v, "case", p, [&](const Json& x, const std::string& q) { cfg.tag = text(x, q); });
        if_present(v, "method", p, [&](const Json& x, const std::string& q) {
            try {
                cfg.method = method_from_string(text(x, q));
            } catch (const SchemaError&) {
                throw;
            } catch (const std::exception& e) {
                throw SchemaError(q, e.what());
            }
        });
        if_present(v, "resolution", p, [&](const Json& x, const std::string& q) { cfg.resolution = unsigned_int(x, q); });
        if_present(v, "budget", p, [&](const Json& x, const std::string& q) { cfg.budget = positive(x, q); });
        if_present(v, "max_exp_argument", p,
                   [&](const Json& x, const std::string& q) { cfg.max_exp_argument = positive(x, q); });
        if_present(v, "t_range", p, [&](const Json& x, const std::string& q) {
            const auto r = number_list(x, q, true);
            if (r.size() != 2 || r[0] >= r[1]) throw SchemaError(q, "expected [t_lo, t_hi] with t_lo < t_hi");
            cfg.grid.t_lo = r[0];
            cfg.grid.t_hi = r[1];
        });
    });
    if_present(j, "report", "", [&](const Json& v, const std::string& p) {
        require_object(v, p);
        allow_keys(v, p, {"cases"});
        if_present(v, "cases", p, [&](const Json& x, const std::string& q) {
            if (!x.is_array()) throw SchemaError(q, "expected an array of case names");
            for (std::size_t i = 0; i < x.size(); ++i) cfg.report_cases.push_back(text(x[i], child(q, std::to_string(i))));
        });
    });
    return cfg;
}

CompareCase to_compare_case(const RunConfig& cfg) {
    CompareCase c;
    c.name = cfg.tag;
    c.tag = cfg.tag;
    c.kernel = cfg.kernel;
    c.model = cfg.model;
    c.geometry = cfg.geometry;
    c.method = cfg.method;
    c.resolution = cfg.resolution;
    c.budget = cfg.budget;
    c.max_exp_argument = cfg.max_exp_argument;
    c.sim = cfg.sim;
    c.settings = cfg.estimate;
    c.grid = cfg.grid;
    return c;
}

}  // namespace subtail
