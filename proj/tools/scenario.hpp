// scenario.hpp: declarative run description read from a JSON file
#pragma once

#include "relax/bath.hpp"
#include "relax/exact.hpp"
#include "relax/weak.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace relax::cli {

inline constexpr int schema_version = 1;

// Syntax errors carry line/column; semantic errors carry the offending key.
class ScenarioError : public std::runtime_error {
public:
    ScenarioError(std::string key, const std::string& reason)
        : std::runtime_error(key.empty() ? reason : key + ": " + reason), key_(std::move(key)) {}
    ScenarioError(int line, int column, const std::string& reason)
        : std::runtime_error("syntax error at line " + std::to_string(line) + ", column " + std::to_string(column) +
                             ": " + reason),
          line_(line), column_(column) {}

    const std::string& key() const { return key_; }
    int line() const { return line_; }
    int column() const { return column_; }

private:
    std::string key_;
    int line_ = 0, column_ = 0;
};

struct ModelSpec {
    enum class Kind { qubit, explicit_matrices, random_total, total };
    Kind kind = Kind::qubit;
    // qubit
    double omega0 = 1;
    QubitCoupling qubit;
    QubitForm form = QubitForm::general;
    // explicit
    Mat h;
    std::vector<Mat> couplings;
    std::vector<Complex> mean_b;
    // total system
    int ds = 2, de = 4, n_couplings = 1;
    double coupling_scale = 0.3;
    Mat h_env;
    std::vector<Coupling> total_couplings;
    std::optional<Mat> rho_env;
};

struct BathSpec {
    bool present = false;
    enum class Type { bosonic, table, exact };
    Type type = Type::table;
    BathMode mode = BathMode::thermal;
    double temperature = 1;
    double p = 1;
    double kappa = 0.3;
    double cutoff = 0;     // bosonic: kappa(W) = kappa e^{-W^2 / 2 cutoff^2}; 0 -> 5 max(max Bohr frequency, T)
    int grid_n = 4097;
    double omega_max = 0;  // 0 -> FreqGrid::for_system
    std::vector<std::pair<double, double>> samples;
    double eps = 0;        // broadening for type exact; 0 -> ExactRelaxator::default_eps
};

struct RunSpec {
    enum class Kind { exact_check, evolve, spectrum, stationary, pauli, response, qubit_demo };
    Kind kind = Kind::spectrum;
    double t_max = 10;
    int nt = 101;
    double omega_min = 0, omega_max = 0;  // 0, 0 -> +-8 max(1, max Bohr frequency)
    int n_omega = 801;
    std::optional<Mat> a, b;              // observables; default sigma_x-like
    std::optional<Mat> rho0;
    double eps = 0;                       // Kubo broadening / exact broadening; 0 -> default
    double tol = 1e-6;
    bool markov = false;                  // replace L(w) by L(0)
    bool secular = false;                 // replace L(w) by the secular Lindblad generator
    enum class Method { laplace, residue, both };
    Method method = Method::both;
    int n_z = 10;                         // exact-check resolvent probes
    bool correlated = true;               // exact-check: correlated initial state
};

struct OutputSpec {
    std::string dir = "out";
    std::vector<std::string> formats{"csv"};
};

struct Scenario {
    int version = schema_version;
    std::string preset;
    ModelSpec model;
    BathSpec bath;
    RunSpec run;
    OutputSpec output;
    std::uint64_t seed = 42;

    bool weak_coupling() const;  // L(w) built from the bath rather than from a finite environment
};

Scenario parse_scenario(const std::string& path);
Scenario parse_scenario_text(const std::string& text);

std::string to_string(RunSpec::Kind k);

// gamma(W >= 0) of the qubit preset: gamma(0) = 0.05, gamma(1) = 0.1, quartic cutoff near W = 5
double qubit_preset_gamma(double w);
std::vector<std::pair<double, double>> qubit_preset_table();

}  // namespace relax::cli
