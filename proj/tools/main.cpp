#include "runner.hpp"
#include "scenario.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"relax-cli: relaxator Liouville dynamics of open quantum systems"};
    std::string scenario_path, out_dir;
    std::uint64_t seed = 0;
    double eps = 0;
    bool verify = false;
    app.add_option("--scenario", scenario_path, "scenario file (JSON)")->required()->check(CLI::ExistingFile);
    auto* out_opt = app.add_option("--out", out_dir, "output directory (default: output.dir of the scenario)");
    auto* seed_opt = app.add_option("--seed", seed, "64-bit seed for random models");
    auto* eps_opt = app.add_option("--eps", eps, "broadening for Kubo and exact L(w + i eps)")->check(CLI::PositiveNumber);
    app.add_flag("--verify", verify, "run the invariant suite only");
    CLI11_PARSE(app, argc, argv);

    relax::cli::Scenario s;
    try {
        s = relax::cli::parse_scenario(scenario_path);
    } catch (const relax::cli::ScenarioError& e) {
        std::cerr << scenario_path << ": " << e.what() << '\n';
        return 2;
    }
    relax::cli::RunOptions opt;
    if (*out_opt) opt.out_dir = out_dir;
    if (*seed_opt) opt.seed = seed;
    if (*eps_opt) opt.eps = eps;
    opt.verify_only = verify;

    const auto res = relax::cli::run_scenario(s, opt);
    for (const auto& c : res.checks) std::cout << relax::cli::format_check(c) << '\n';
    for (const auto& i : res.info) std::cout << "info " << i << '\n';
    if (!res.error.empty()) std::cerr << "error: " << res.error << '\n';
    std::cout << "result: " << (res.status == 0 ? "PASS" : "FAIL") << '\n';
    return res.status;
}
