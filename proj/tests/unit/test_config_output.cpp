#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "subtail/config.hpp"
#include "subtail/output.hpp"

#ifndef SUBTAIL_CLI_PATH
#define SUBTAIL_CLI_PATH "subtail"
#endif

using namespace subtail;
namespace fs = std::filesystem;

namespace {

std::string pointer_of(const Json& j) {
    try {
        parse_run_config(j);
    } catch (const SchemaError& e) {
        return e.pointer();
    }
    return "";
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("subtail_unit_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run_cli(const std::string& args) {
    const int code = std::system((std::string(SUBTAIL_CLI_PATH) + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(code) ? WEXITSTATUS(code) : -1;
}

}  // namespace

TEST_CASE("kernel parsing") {
    const Kernel c = parse_kernel(Json::parse(R"({"kind": "caputo", "beta": 0.3})"));
    REQUIRE(c.is_power());
    CHECK(std::get<PowerKernel>(c.spec()).scale == doctest::Approx(1.0 / std::tgamma(0.7)));
    const Kernel d = parse_kernel(Json::parse(R"({"kind": "distributed", "terms": [{"beta": 0.3, "kappa": 1}]})"));
    CHECK(d.kind() == Kernel{DistributedKernel{{{0.3, 1.0}}}}.kind());
    const Kernel back = parse_kernel(kernel_to_json(Kernel{TruncatedKernel{0.4, 2.0, 3.0}}));
    const auto& t = std::get<TruncatedKernel>(back.spec());
    CHECK(t.beta == 0.4);
    CHECK(t.delta == 2.0);
    CHECK(t.scale == 3.0);
}

TEST_CASE("schema errors carry a pointer") {
    CHECK(pointer_of(Json::parse(R"({"model": {"alpha": 3}})")) == "/model/alpha");
    CHECK(pointer_of(Json::parse(R"({"kernel": {"kind": "caputo", "beta": 1.5}})")) == "/kernel/beta");
    CHECK(pointer_of(Json::parse(R"({"sim": {"paths": 10}})")) == "/sim/paths");
    CHECK(pointer_of(Json::parse(R"({"bogus": 1})")) == "/bogus");
    CHECK(pointer_of(Json::parse(R"({"model": {"geometry": {"kind": "torus"}}})")) == "/model/geometry/kind");
    CHECK(pointer_of(Json::parse(R"({"sim": {"backend": "gpu"}})")) == "/sim/backend");
    CHECK(pointer_of(Json::parse(R"({"model": {"family": "J2"}})")).empty());
}

TEST_CASE("number formatting and CSV") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(1.0 / 0.0) == "inf");
    CHECK(format_double(-1.0 / 0.0) == "-inf");
    CHECK(std::stod(format_double(M_PI)) == M_PI);
    DataTable t{{"a", "b"}, {{1.0, 2.5}}};
    CHECK(to_csv(t) == "a,b\n1,2.5\n");
    CHECK(to_csv(t, "abc").rfind("# manifest abc\na,b\n", 0) == 0);
}

TEST_CASE("hashing and manifests") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
    RunManifest m;
    m.subcommand = "tails";
    m.seed = 3;
    const std::string h = m.hash();
    m.wall_clock_seconds = 123.0;
    CHECK(m.hash() == h);
    m.seed = 4;
    CHECK(m.hash() != h);
}

TEST_CASE("atomic writes replace the target and leave no temporary") {
    const fs::path dir = scratch("atomic");
    write_atomic(dir / "sub" / "f.txt", "one");
    write_atomic(dir / "sub" / "f.txt", "two");
    CHECK(slurp(dir / "sub" / "f.txt") == "two");
    CHECK_FALSE(fs::exists(dir / "sub" / "f.txt.tmp"));
}

TEST_CASE("command line front-end") {
    const fs::path dir = scratch("cli");
    {
        std::ofstream(dir / "phi.json") << R"({"kernel": {"kind": "caputo", "beta": 0.5},
                                             "phi_table": {"lambda_min": 0.001, "lambda_max": 1000, "points": 13}})";
    }
    REQUIRE(run_cli("phi-table --config " + (dir / "phi.json").string() + " --out " + (dir / "a").string()) == 0);
    std::istringstream csv(slurp(dir / "a" / "phi_table.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line.rfind("# manifest ", 0) == 0);
    std::getline(csv, line);
    CHECK(line.rfind("lambda,phi", 0) == 0);
    int rows = 0;
    while (std::getline(csv, line)) {
        double lam = 0, phi = 0;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf", &lam, &phi) == 2);
        CHECK(phi == doctest::Approx(std::sqrt(lam)).epsilon(1e-8));
        ++rows;
    }
    CHECK(rows == 13);
    CHECK(fs::exists(dir / "a" / "manifest.json"));

    REQUIRE(run_cli("phi-table --config " + (dir / "phi.json").string() + " --out " + (dir / "b").string()) == 0);
    CHECK(slurp(dir / "a" / "phi_table.csv") == slurp(dir / "b" / "phi_table.csv"));

    {
        std::ofstream(dir / "bad.json") << R"({"model": {"alpha": -1}})";
    }
    CHECK(run_cli("conditions --config " + (dir / "bad.json").string() + " --out " + (dir / "c").string()) == 2);
    CHECK(run_cli("no-such-subcommand") == 2);

    {
        std::ofstream(dir / "est.json") << R"({"model": {"family": "J2", "alpha": 1, "d": 1},
                                             "query": {"case": "specialsmall-i-a", "t": 1, "x": 0, "y": 5}})";
    }
    CHECK(run_cli("estimate --config " + (dir / "est.json").string() + " --out " + (dir / "d").string()) == 3);
}
