// Runs acceptance criteria 1..12 and prints one PASS/FAIL line per criterion.
// Usage: acceptance [--strict] [id ...]
// Exit status is 0 once every selected criterion has run; --strict also
// requires every verdict to be PASS.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <sys/wait.h>
#include <set>
#include <sstream>
#include <string>

#include "subtail/experiments.hpp"

#ifndef SUBTAIL_CLI_PATH
#define SUBTAIL_CLI_PATH "subtail"
#endif

namespace fs = std::filesystem;
using namespace subtail;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// every file below root except manifest.json, keyed by relative path
std::map<std::string, std::string> outputs(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (!e.is_regular_file() || e.path().filename() == "manifest.json") continue;
        out[fs::relative(e.path(), root).string()] = slurp(e.path());
    }
    return out;
}

StudyResult determinism() {
    StudyResult res;
    res.id = 12;
    res.name = "report determinism";
    const auto t0 = std::chrono::steady_clock::now();
    const fs::path base = fs::temp_directory_path() / "subtail_acceptance_report";
    fs::remove_all(base);
    int codes[2];
    for (int i = 0; i < 2; ++i) {
        const fs::path dir = base / (i ? "b" : "a");
        const std::string cmd = std::string(SUBTAIL_CLI_PATH) + " report --out " + dir.string() + " > " +
                                (base / ("log" + std::to_string(i) + ".txt")).string() + " 2>&1";
        fs::create_directories(base);
        codes[i] = std::system(cmd.c_str());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto a = outputs(base / "a");
    const auto b = outputs(base / "b");
    std::size_t differing = 0;
    for (const auto& [name, bytes] : a) {
        auto it = b.find(name);
        if (it == b.end() || it->second != bytes) {
            ++differing;
            res.notes.push_back("differs: " + name);
        }
    }
    if (a.size() != b.size()) ++differing;
    const bool ran = a.count("report.json") && WIFEXITED(codes[0]) && WEXITSTATUS(codes[0]) <= 1;
    res.seconds = seconds;
    res.metrics = {{"files", double(a.size())}, {"differing", double(differing)}, {"suite_seconds", seconds / 2}};
    res.pass = ran && differing == 0 && seconds / 2 < 1200.0;
    std::ostringstream os;
    os << a.size() << " files, " << differing << " differ, one suite run " << static_cast<int>(seconds / 2) << " s";
    if (!ran) os << " (report did not complete)";
    res.summary = os.str();
    return res;
}

}  // namespace

int main(int argc, char** argv) {
    bool strict = false;
    std::set<int> chosen;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--strict") strict = true;
        else chosen.insert(std::atoi(a.c_str()));
    }
    if (chosen.empty())
        for (int i = 1; i <= 12; ++i) chosen.insert(i);
    int failures = 0;
    for (int id : chosen) {
        StudyResult r = id == 12 ? determinism() : run_study(id);
        std::printf("AC%-2d %s  %s: %s (%.1f s)\n", id, r.pass ? "PASS" : "FAIL", r.name.c_str(), r.summary.c_str(),
                    r.seconds);
        for (const auto& [k, v] : r.metrics) std::printf("       %-34s %.6g\n", k.c_str(), v);
        std::size_t shown = 0;
        for (const auto& n : r.notes) {
            if (++shown > 8) {
                std::printf("       ... %zu more notes\n", r.notes.size() - 8);
                break;
            }
            std::printf("       note: %s\n", n.c_str());
        }
        std::fflush(stdout);
        failures += r.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria failed\n", failures, chosen.size());
    return strict && failures ? 1 : 0;
}
