// runner.hpp: executes a Scenario and writes CSV artifacts plus report.txt
#pragma once

#include "scenario.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace relax::cli {

struct RunOptions {
    std::string out_dir;                 // empty -> scenario output.dir
    std::optional<std::uint64_t> seed;   // overrides the scenario seed
    std::optional<double> eps;           // overrides run.eps
    bool verify_only = false;
};

struct Check {
    std::string name;
    bool pass = true;
    double value = 0;
    double tol = 0;
    std::string detail;
};

struct RunResult {
    int status = 0;                      // 0 pass, 1 a check failed, 3 a module error
    std::vector<Check> checks;
    std::vector<std::string> info;       // "key: value" lines without a verdict
    std::vector<std::string> files;
    std::string error;
};

std::string format_check(const Check& c);

RunResult run_scenario(const Scenario& s, const RunOptions& opt = {});

}  // namespace relax::cli
