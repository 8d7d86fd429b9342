#include "scenario.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace relax::cli {

using json = nlohmann::json;

namespace {

void allow_keys(const json& j, const std::string& where, const std::set<std::string>& keys) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!keys.count(it.key())) throw ScenarioError(where.empty() ? it.key() : where + "." + it.key(), "unknown key");
}

const json* find(const json& j, const std::string& key) {
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

double number(const json& j, const std::string& key) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf" || s == "infinity") return infinite_temperature;
    }
    throw ScenarioError(key, "expected a number");
}

double number_or(const json& j, const std::string& key, const std::string& path, double fallback) {
    const json* v = find(j, key);
    return v ? number(*v, path + key) : fallback;
}

int integer_or(const json& j, const std::string& key, const std::string& path, int fallback) {
    const json* v = find(j, key);
    if (!v) return fallback;
    if (!v->is_number_integer()) throw ScenarioError(path + key, "expected an integer");
    return v->get<int>();
}

bool bool_or(const json& j, const std::string& key, const std::string& path, bool fallback) {
    const json* v = find(j, key);
    if (!v) return fallback;
    if (!v->is_boolean()) throw ScenarioError(path + key, "expected true or false");
    return v->get<bool>();
}

std::string string_or(const json& j, const std::string& key, const std::string& path, const std::string& fallback) {
    const json* v = find(j, key);
    if (!v) return fallback;
    if (!v->is_string()) throw ScenarioError(path + key, "expected a string");
    return v->get<std::string>();
}

Complex complex_value(const json& j, const std::string& key) {
    if (j.is_number()) return j.get<double>();
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw ScenarioError(key, "expected a number or [re, im]");
}

Mat matrix(const json& j, const std::string& key) {
    if (!j.is_array() || j.empty()) throw ScenarioError(key, "expected a non-empty list of rows");
    const auto n = static_cast<Eigen::Index>(j.size());
    Mat m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const json& row = j[static_cast<std::size_t>(r)];
        const std::string rk = key + "[" + std::to_string(r) + "]";
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
            throw ScenarioError(rk, "expected a row of length " + std::to_string(n));
        for (Eigen::Index c = 0; c < n; ++c)
            m(r, c) = complex_value(row[static_cast<std::size_t>(c)], rk + "[" + std::to_string(c) + "]");
    }
    return m;
}

Mat hermitian_matrix(const json& j, const std::string& key) {
    Mat m = matrix(j, key);
    if (!is_hermitian(m, 1e-12)) throw ScenarioError(key, "matrix is not Hermitian");
    return m;
}

void parse_model(const json& j, Scenario& s) {
    if (!j.is_object()) throw ScenarioError("model", "expected an object");
    ModelSpec& m = s.model;
    const std::string kind = string_or(j, "kind", "model.", "qubit");
    if (kind == "qubit") {
        allow_keys(j, "model", {"kind", "omega0", "s_g", "s_e", "s_eg", "form"});
        m.kind = ModelSpec::Kind::qubit;
        m.omega0 = number_or(j, "omega0", "model.", m.omega0);
        if (!(m.omega0 > 0)) throw ScenarioError("model.omega0", "must be positive");
        m.qubit.s_g = number_or(j, "s_g", "model.", m.qubit.s_g);
        m.qubit.s_e = number_or(j, "s_e", "model.", m.qubit.s_e);
        if (const json* v = find(j, "s_eg")) m.qubit.s_eg = complex_value(*v, "model.s_eg");
        const std::string form = string_or(j, "form", "model.", "general");
        if (form == "general") m.form = QubitForm::general;
        else if (form == "printed") m.form = QubitForm::printed;
        else throw ScenarioError("model.form", "expected general or printed");
    } else if (kind == "explicit") {
        allow_keys(j, "model", {"kind", "h", "couplings", "mean_b"});
        m.kind = ModelSpec::Kind::explicit_matrices;
        const json* h = find(j, "h");
        if (!h) throw ScenarioError("model.h", "required");
        m.h = hermitian_matrix(*h, "model.h");
        const json* cs = find(j, "couplings");
        if (!cs || !cs->is_array() || cs->empty()) throw ScenarioError("model.couplings", "expected a non-empty list");
        for (std::size_t k = 0; k < cs->size(); ++k) {
            const std::string key = "couplings[" + std::to_string(k) + "]";
            Mat c = matrix((*cs)[k], key);
            if (c.rows() != m.h.rows())
                throw ScenarioError(key, "dimension " + std::to_string(c.rows()) + " does not match H dimension " +
                                             std::to_string(m.h.rows()));
            if (!is_hermitian(c, 1e-12)) throw ScenarioError(key, "matrix is not Hermitian");
            m.couplings.push_back(std::move(c));
        }
        if (const json* mb = find(j, "mean_b")) {
            if (!mb->is_array() || mb->size() != cs->size())
                throw ScenarioError("model.mean_b", "expected one entry per coupling");
            for (std::size_t k = 0; k < mb->size(); ++k)
                m.mean_b.push_back(complex_value((*mb)[k], "model.mean_b[" + std::to_string(k) + "]"));
        }
    } else if (kind == "random_total") {
        allow_keys(j, "model", {"kind", "ds", "de", "couplings", "scale"});
        m.kind = ModelSpec::Kind::random_total;
        m.ds = integer_or(j, "ds", "model.", m.ds);
        m.de = integer_or(j, "de", "model.", m.de);
        m.n_couplings = integer_or(j, "couplings", "model.", m.n_couplings);
        m.coupling_scale = number_or(j, "scale", "model.", m.coupling_scale);
        if (m.ds < 2 || m.ds > 6) throw ScenarioError("model.ds", "must lie in [2, 6]");
        if (m.de < 1 || m.de > 16) throw ScenarioError("model.de", "must lie in [1, 16]");
        if (m.n_couplings < 1) throw ScenarioError("model.couplings", "must be positive");
    } else if (kind == "total") {
        allow_keys(j, "model", {"kind", "h", "h_env", "couplings", "rho_env"});
        m.kind = ModelSpec::Kind::total;
        const json* h = find(j, "h");
        const json* he = find(j, "h_env");
        if (!h) throw ScenarioError("model.h", "required");
        if (!he) throw ScenarioError("model.h_env", "required");
        m.h = hermitian_matrix(*h, "model.h");
        m.h_env = hermitian_matrix(*he, "model.h_env");
        const json* cs = find(j, "couplings");
        if (!cs || !cs->is_array() || cs->empty()) throw ScenarioError("model.couplings", "expected a non-empty list");
        for (std::size_t k = 0; k < cs->size(); ++k) {
            const std::string key = "couplings[" + std::to_string(k) + "]";
            const json& c = (*cs)[k];
            if (!c.is_object() || !c.contains("s") || !c.contains("b"))
                throw ScenarioError(key, "expected an object with s and b");
            Coupling cp{hermitian_matrix(c["s"], key + ".s"), hermitian_matrix(c["b"], key + ".b")};
            if (cp.s.rows() != m.h.rows())
                throw ScenarioError(key, "dimension " + std::to_string(cp.s.rows()) + " does not match H dimension " +
                                             std::to_string(m.h.rows()));
            if (cp.b.rows() != m.h_env.rows())
                throw ScenarioError(key, "dimension " + std::to_string(cp.b.rows()) +
                                             " does not match H_env dimension " + std::to_string(m.h_env.rows()));
            m.total_couplings.push_back(std::move(cp));
        }
        if (const json* r = find(j, "rho_env")) {
            Mat re = hermitian_matrix(*r, "model.rho_env");
            if (re.rows() != m.h_env.rows()) throw ScenarioError("model.rho_env", "dimension does not match H_env");
            m.rho_env = re;
        }
        m.ds = static_cast<int>(m.h.rows());
        m.de = static_cast<int>(m.h_env.rows());
    } else {
        throw ScenarioError("model.kind", "expected qubit, explicit, random_total or total");
    }
}

void parse_bath(const json& j, Scenario& s) {
    if (!j.is_object()) throw ScenarioError("bath", "expected an object");
    allow_keys(j, "bath", {"type", "T", "p", "kappa", "cutoff", "grid", "samples", "mode", "eps"});
    BathSpec& b = s.bath;
    b.present = true;
    const std::string type = string_or(j, "type", "bath.", "table");
    if (type == "bosonic") b.type = BathSpec::Type::bosonic;
    else if (type == "table") b.type = BathSpec::Type::table;
    else if (type == "exact") b.type = BathSpec::Type::exact;
    else throw ScenarioError("bath.type", "expected bosonic, table or exact");
    b.temperature = number_or(j, "T", "bath.", b.temperature);
    if (!(b.temperature > 0)) throw ScenarioError("bath.T", "must be positive");
    const std::string mode = string_or(j, "mode", "bath.", std::isinf(b.temperature) ? "uniform" : "thermal");
    if (mode == "thermal") b.mode = BathMode::thermal;
    else if (mode == "uniform") b.mode = BathMode::uniform;
    else throw ScenarioError("bath.mode", "expected thermal or uniform");
    if (b.mode == BathMode::thermal && std::isinf(b.temperature))
        throw ScenarioError("bath.mode", "thermal mode needs a finite T");
    b.p = number_or(j, "p", "bath.", b.p);
    if (!(b.p >= 1)) throw ScenarioError("bath.p", "must be at least 1");
    b.kappa = number_or(j, "kappa", "bath.", b.kappa);
    b.cutoff = number_or(j, "cutoff", "bath.", b.cutoff);
    if (b.cutoff < 0) throw ScenarioError("bath.cutoff", "must be positive");
    b.eps = number_or(j, "eps", "bath.", b.eps);
    if (const json* g = find(j, "grid")) {
        if (!g->is_object()) throw ScenarioError("bath.grid", "expected an object");
        allow_keys(*g, "bath.grid", {"n", "omega_max"});
        b.grid_n = integer_or(*g, "n", "bath.grid.", b.grid_n);
        b.omega_max = number_or(*g, "omega_max", "bath.grid.", b.omega_max);
        if (b.grid_n < 65 || b.grid_n % 2 == 0) throw ScenarioError("bath.grid.n", "must be odd and at least 65");
        if (b.omega_max < 0) throw ScenarioError("bath.grid.omega_max", "must be positive");
    }
    if (const json* smp = find(j, "samples")) {
        if (!smp->is_array()) throw ScenarioError("bath.samples", "expected a list of [W, gamma] rows");
        for (std::size_t i = 0; i < smp->size(); ++i) {
            const json& row = (*smp)[i];
            const std::string key = "bath.samples[" + std::to_string(i) + "]";
            if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number())
                throw ScenarioError(key, "expected [W, gamma]");
            const double w = row[0].get<double>(), g = row[1].get<double>();
            if (w < 0) throw ScenarioError(key, "W must be non-negative");
            if (g < 0) throw ScenarioError(key, "gamma must be non-negative");
            if (!b.samples.empty() && w <= b.samples.back().first) throw ScenarioError(key, "W must increase");
            b.samples.emplace_back(w, g);
        }
    }
    if (b.type == BathSpec::Type::table && b.samples.size() < 2)
        throw ScenarioError("bath.samples", "a table bath needs at least two rows");
}

void parse_run(const json& j, Scenario& s) {
    if (!j.is_object()) throw ScenarioError("run", "expected an object");
    allow_keys(j, "run", {"kind", "t_max", "nt", "omega", "a", "b", "rho0", "eps", "tol", "markov", "secular",
                          "method", "n_z", "correlated"});
    RunSpec& r = s.run;
    const std::string kind = string_or(j, "kind", "run.", "");
    if (kind == "exact-check") r.kind = RunSpec::Kind::exact_check;
    else if (kind == "evolve") r.kind = RunSpec::Kind::evolve;
    else if (kind == "spectrum") r.kind = RunSpec::Kind::spectrum;
    else if (kind == "stationary") r.kind = RunSpec::Kind::stationary;
    else if (kind == "pauli") r.kind = RunSpec::Kind::pauli;
    else if (kind == "response") r.kind = RunSpec::Kind::response;
    else if (kind == "qubit-demo") r.kind = RunSpec::Kind::qubit_demo;
    else
        throw ScenarioError("run.kind",
                            "expected exact-check, evolve, spectrum, stationary, pauli, response or qubit-demo");
    r.t_max = number_or(j, "t_max", "run.", r.t_max);
    r.nt = integer_or(j, "nt", "run.", r.nt);
    if (!(r.t_max > 0)) throw ScenarioError("run.t_max", "must be positive");
    if (r.nt < 2) throw ScenarioError("run.nt", "must be at least 2");
    if (const json* w = find(j, "omega")) {
        if (!w->is_object()) throw ScenarioError("run.omega", "expected an object");
        allow_keys(*w, "run.omega", {"min", "max", "n"});
        r.omega_min = number_or(*w, "min", "run.omega.", r.omega_min);
        r.omega_max = number_or(*w, "max", "run.omega.", r.omega_max);
        r.n_omega = integer_or(*w, "n", "run.omega.", r.n_omega);
        if (r.n_omega < 3 || r.n_omega % 2 == 0) throw ScenarioError("run.omega.n", "must be odd and at least 3");
        if (!(r.omega_max > r.omega_min)) throw ScenarioError("run.omega", "max must exceed min");
    }
    if (const json* a = find(j, "a")) r.a = hermitian_matrix(*a, "run.a");
    if (const json* b = find(j, "b")) r.b = hermitian_matrix(*b, "run.b");
    if (const json* rho = find(j, "rho0")) {
        Mat m = hermitian_matrix(*rho, "run.rho0");
        if (std::abs(m.trace() - 1.0) > 1e-10) throw ScenarioError("run.rho0", "trace must be 1");
        r.rho0 = m;
    }
    r.eps = number_or(j, "eps", "run.", r.eps);
    r.tol = number_or(j, "tol", "run.", r.tol);
    if (r.eps < 0) throw ScenarioError("run.eps", "must be non-negative");
    if (!(r.tol > 0)) throw ScenarioError("run.tol", "must be positive");
    r.markov = bool_or(j, "markov", "run.", r.markov);
    r.secular = bool_or(j, "secular", "run.", r.secular);
    const std::string method = string_or(j, "method", "run.", "both");
    if (method == "laplace") r.method = RunSpec::Method::laplace;
    else if (method == "residue") r.method = RunSpec::Method::residue;
    else if (method == "both") r.method = RunSpec::Method::both;
    else throw ScenarioError("run.method", "expected laplace, residue or both");
    r.n_z = integer_or(j, "n_z", "run.", r.n_z);
    r.correlated = bool_or(j, "correlated", "run.", r.correlated);
}

void parse_output(const json& j, Scenario& s) {
    if (!j.is_object()) throw ScenarioError("output", "expected an object");
    allow_keys(j, "output", {"dir", "formats"});
    s.output.dir = string_or(j, "dir", "output.", s.output.dir);
    if (const json* f = find(j, "formats")) {
        if (!f->is_array()) throw ScenarioError("output.formats", "expected a list");
        s.output.formats.clear();
        for (const auto& e : *f) {
            if (!e.is_string() || e.get<std::string>() != "csv")
                throw ScenarioError("output.formats", "only csv is supported");
            s.output.formats.push_back("csv");
        }
    }
}

void expand_preset(const json& root, Scenario& s) {
    if (s.preset != "qubit") throw ScenarioError("preset", "unknown preset '" + s.preset + "'");
    s.model.kind = ModelSpec::Kind::qubit;
    s.model.omega0 = number_or(root, "omega0", "", 1.0);
    s.model.qubit.s_eg = 1.0;
    s.bath.present = true;
    s.bath.type = BathSpec::Type::table;
    s.bath.temperature = number_or(root, "T", "", 1.0);
    if (!(s.bath.temperature > 0)) throw ScenarioError("T", "must be positive");
    s.bath.mode = std::isinf(s.bath.temperature) ? BathMode::uniform : BathMode::thermal;
    s.bath.samples = qubit_preset_table();
}

std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

}  // namespace

bool Scenario::weak_coupling() const {
    if (model.kind == ModelSpec::Kind::qubit || model.kind == ModelSpec::Kind::explicit_matrices) return true;
    return bath.present && bath.type == BathSpec::Type::exact;
}

double qubit_preset_gamma(double w) {
    const double w2 = w * w;
    return (0.05 + 0.05 * w2 * std::exp((1 - w2) / 4)) * std::exp(-w2 * (w2 - 1) / 625.0);
}

std::vector<std::pair<double, double>> qubit_preset_table() {
    std::vector<std::pair<double, double>> t;
    for (int i = 0; i <= 800; ++i) {
        const double w = 0.025 * i;
        t.emplace_back(w, qubit_preset_gamma(w));
    }
    return t;
}

std::string to_string(RunSpec::Kind k) {
    switch (k) {
        case RunSpec::Kind::exact_check: return "exact-check";
        case RunSpec::Kind::evolve: return "evolve";
        case RunSpec::Kind::spectrum: return "spectrum";
        case RunSpec::Kind::stationary: return "stationary";
        case RunSpec::Kind::pauli: return "pauli";
        case RunSpec::Kind::response: return "response";
        case RunSpec::Kind::qubit_demo: return "qubit-demo";
    }
    return "?";
}

Scenario parse_scenario_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_column(text, e.byte);
        std::string what = e.what();
        const auto pos = what.find("parse error");
        throw ScenarioError(line, col, pos == std::string::npos ? what : what.substr(pos));
    }
    if (!root.is_object()) throw ScenarioError("", "scenario must be a JSON object");
    allow_keys(root, "", {"schema_version", "preset", "omega0", "T", "seed", "model", "bath", "run", "output"});
    const json* ver = find(root, "schema_version");
    if (!ver) throw ScenarioError("schema_version", "required");
    if (!ver->is_number_integer() || ver->get<int>() != schema_version)
        throw ScenarioError("schema_version", "unsupported version (expected " + std::to_string(schema_version) + ")");

    Scenario s;
    if (const json* seed = find(root, "seed")) {
        if (!seed->is_number_unsigned()) throw ScenarioError("seed", "expected a non-negative integer");
        s.seed = seed->get<std::uint64_t>();
    }
    s.preset = string_or(root, "preset", "", "");
    if (!s.preset.empty()) {
        expand_preset(root, s);
    } else if (find(root, "omega0") || find(root, "T")) {
        throw ScenarioError(find(root, "omega0") ? "omega0" : "T", "only valid together with a preset");
    }
    if (const json* m = find(root, "model")) {
        if (!s.preset.empty()) throw ScenarioError("model", "cannot be combined with a preset");
        parse_model(*m, s);
    } else if (s.preset.empty()) {
        throw ScenarioError("model", "required");
    }
    if (const json* b = find(root, "bath")) parse_bath(*b, s);
    if (const json* o = find(root, "output")) parse_output(*o, s);
    const json* r = find(root, "run");
    if (!r) {
        if (s.preset.empty()) throw ScenarioError("run", "required");
        s.run.kind = RunSpec::Kind::spectrum;
    } else {
        parse_run(*r, s);
    }

    const bool total = s.model.kind == ModelSpec::Kind::random_total || s.model.kind == ModelSpec::Kind::total;
    if (s.run.kind == RunSpec::Kind::exact_check && !total)
        throw ScenarioError("run.kind", "exact-check needs a random_total or total model");
    if (s.bath.present && s.bath.type == BathSpec::Type::exact && !total)
        throw ScenarioError("bath.type", "an exact bath needs a random_total or total model");
    if (s.run.kind == RunSpec::Kind::qubit_demo && s.model.kind != ModelSpec::Kind::qubit)
        throw ScenarioError("run.kind", "qubit-demo needs a qubit model");
    if (s.weak_coupling() && s.run.kind != RunSpec::Kind::exact_check && !s.bath.present)
        throw ScenarioError("bath", "bath required");

    const int d = s.model.kind == ModelSpec::Kind::qubit               ? 2
                  : s.model.kind == ModelSpec::Kind::explicit_matrices ? static_cast<int>(s.model.h.rows())
                                                                        : s.model.ds;
    auto check_dim = [&](const std::optional<Mat>& m, const std::string& key) {
        if (m && m->rows() != d)
            throw ScenarioError(key, "dimension " + std::to_string(m->rows()) + " does not match system dimension " +
                                         std::to_string(d));
    };
    check_dim(s.run.a, "run.a");
    check_dim(s.run.b, "run.b");
    check_dim(s.run.rho0, "run.rho0");
    return s;
}

Scenario parse_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("", "cannot open scenario file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario_text(ss.str());
}

}  // namespace relax::cli
