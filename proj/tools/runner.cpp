#include "runner.hpp"

#include "relax/bath.hpp"
#include "relax/checks.hpp"
#include "relax/exact.hpp"
#include "relax/markov.hpp"
#include "relax/pauli.hpp"
#include "relax/qubit.hpp"
#include "relax/response.hpp"
#include "relax/spectral.hpp"
#include "relax/weak.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>

namespace relax::cli {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

class Csv {
public:
    Csv(const fs::path& path, const std::vector<std::string>& header) : out_(path) {
        if (!out_) throw std::runtime_error("cannot write " + path.string());
        for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
        out_ << '\n';
    }
    void row(const std::vector<double>& v) {
        char buf[40];
        for (std::size_t i = 0; i < v.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", v[i]);
            out_ << (i ? "," : "") << buf;
        }
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

Mat random_hermitian(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    Mat m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = Complex(n(rng), n(rng));
    return 0.5 * (m + m.adjoint());
}

Mat random_density(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    Mat a(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = Complex(n(rng), n(rng));
    Mat r = a * a.adjoint();
    return r / r.trace();
}

double min_eigenvalue(const Mat& rho) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

RVec spectrum(const Mat& rho) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

std::vector<std::string> rho_header(int d) {
    std::vector<std::string> h{"t"};
    for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n) {
            h.push_back("re_rho_" + std::to_string(m) + std::to_string(n));
            h.push_back("im_rho_" + std::to_string(m) + std::to_string(n));
        }
    return h;
}

std::vector<double> rho_row(double t, const Mat& rho) {
    std::vector<double> r{t};
    for (int m = 0; m < rho.rows(); ++m)
        for (int n = 0; n < rho.cols(); ++n) {
            r.push_back(rho(m, n).real());
            r.push_back(rho(m, n).imag());
        }
    return r;
}

// Everything a run needs, assembled from the scenario.
struct Context {
    Context(const Scenario& sc, std::uint64_t seed, RunResult* res) : s(sc), rng(seed), out(res) {}

    const Scenario& s;
    std::mt19937_64 rng;
    std::optional<TotalSystem> total;
    std::shared_ptr<const ExactRelaxator> rel;
    std::shared_ptr<const BathCorrelation> bath;
    std::shared_ptr<const WeakCouplingModel> weak;
    std::shared_ptr<const FreqLiouvillian> fl;
    Mat h;                  // system Hamiltonian (H_P for weak models)
    double max_bohr = 1;
    double eps = 0;
    RunResult* out = nullptr;

    int dim() const { return static_cast<int>(h.rows()); }
    void check(std::string name, double value, double tol, bool pass, std::string detail = {}) {
        out->checks.push_back({std::move(name), pass, value, tol, std::move(detail)});
    }
    void below(const std::string& name, double value, double tol, std::string detail = {}) {
        check(name, value, tol, value < tol, std::move(detail));
    }
    void info(const std::string& key, const std::string& value) { out->info.push_back(key + ": " + value); }
};

void build_total(Context& c) {
    const ModelSpec& m = c.s.model;
    if (m.kind == ModelSpec::Kind::total) {
        c.total.emplace(m.h, m.h_env, m.total_couplings, m.rho_env);
        return;
    }
    Mat h = random_hermitian(m.ds, c.rng);
    Mat he = random_hermitian(m.de, c.rng);
    std::vector<Coupling> cs;
    for (int k = 0; k < m.n_couplings; ++k)
        cs.push_back({m.coupling_scale * random_hermitian(m.ds, c.rng), random_hermitian(m.de, c.rng)});
    c.total.emplace(h, he, cs);
}

std::shared_ptr<const BathCorrelation> build_bath(const Context& c) {
    const BathSpec& b = c.s.bath;
    const FreqGrid grid =
        b.omega_max > 0 ? FreqGrid(b.omega_max, b.grid_n) : FreqGrid::for_system(c.max_bohr, b.temperature, b.grid_n);
    switch (b.type) {
        case BathSpec::Type::bosonic: {
            const double kappa = b.kappa;
            const double wc = b.cutoff > 0 ? b.cutoff
                                           : 5 * std::max(c.max_bohr, std::isfinite(b.temperature) ? b.temperature : 0.0);
            return std::make_shared<BathCorrelation>(gamma_bosonic(
                b.p, [kappa, wc](double w) { return kappa * std::exp(-0.5 * w * w / (wc * wc)); }, b.temperature, grid));
        }
        case BathSpec::Type::table:
            return std::make_shared<BathCorrelation>(gamma_from_table(b.samples, b.mode, b.temperature, grid));
        case BathSpec::Type::exact: {
            const double eps = b.eps > 0 ? b.eps : c.rel->default_eps(-grid.omega_max(), grid.omega_max());
            return std::make_shared<BathCorrelation>(gamma_from_env_exact(*c.total, eps, grid));
        }
    }
    throw std::logic_error("unknown bath type");
}

double max_bohr_of(const Mat& h) {
    Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
    return std::max(1e-6, es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff());
}

void build(Context& c) {
    const Scenario& s = c.s;
    const ModelSpec& m = s.model;
    std::vector<Mat> couplings;
    std::vector<Complex> mean_b;
    switch (m.kind) {
        case ModelSpec::Kind::qubit:
            c.h = qubit_hamiltonian(m.omega0);
            couplings = {m.qubit.matrix()};
            break;
        case ModelSpec::Kind::explicit_matrices:
            c.h = m.h;
            couplings = m.couplings;
            mean_b = m.mean_b;
            break;
        case ModelSpec::Kind::random_total:
        case ModelSpec::Kind::total:
            build_total(c);
            c.h = c.total->h();
            c.rel = std::make_shared<ExactRelaxator>(*c.total);
            for (std::size_t k = 0; k < c.total->couplings().size(); ++k) {
                couplings.push_back(c.total->couplings()[k].s);
                mean_b.push_back(c.total->mean_b(static_cast<int>(k)));
            }
            break;
    }
    c.max_bohr = max_bohr_of(c.h);

    if (s.weak_coupling()) {
        if (!s.bath.present) throw ScenarioError("bath", "bath required");
        c.bath = build_bath(c);
        c.weak = std::make_shared<WeakCouplingModel>(c.h, couplings, c.bath, mean_b);
        if (m.kind == ModelSpec::Kind::qubit)
            c.fl = qubit_liouvillian(m.omega0, m.qubit, c.bath, m.form);
        else
            c.fl = liouvillian_weak(c.weak);
    } else if (c.rel) {
        c.eps = c.eps > 0 ? c.eps : c.rel->default_eps(-4 * c.max_bohr, 4 * c.max_bohr);
        c.fl = std::make_shared<ExactFreqLiouvillian>(c.rel, c.eps);
    }
    if (c.fl && s.run.secular) {
        if (!c.weak) throw ScenarioError("run.secular", "needs a weak-coupling model");
        c.fl = secular_liouvillian(*c.weak);
    } else if (c.fl && s.run.markov) {
        c.fl = markov_limit(*c.fl);
    }
}

std::vector<double> probe_frequencies(const Context& c) {
    std::vector<double> w;
    const double lim = c.fl->max_frequency();
    for (double f : {0.0, 0.25, 0.5, 1.0, 2.0}) {
        const double x = f * c.max_bohr;
        if (x <= lim) w.push_back(x);
    }
    return w;
}

void invariant_suite(Context& c) {
    const auto rep = liouvillian_invariants(*c.fl, probe_frequencies(c));
    c.below("trace_conservation", rep.trace, 1e-10);
    c.below("hermiticity_pairing_L", rep.pairing_l, 1e-9);
    c.below("hermiticity_pairing_shift", rep.pairing_h, 1e-9);
    c.below("hermiticity_pairing_relaxator", rep.pairing_g, 1e-9);
    if (c.bath) {
        const double v = c.bath->symmetry_violation();
        c.below(c.bath->mode() == BathMode::thermal ? "kms" : "gamma_evenness", v, 1e-8);
        if (c.bath->mode() == BathMode::uniform && !c.s.run.markov && !c.s.run.secular) {
            c.check("relaxator_positivity", rep.min_gamma, -1e-9, rep.min_gamma > -1e-9);
            c.below("relaxator_evenness", rep.evenness, 1e-9);
        }
        c.info("bath_edge_ratio", num(c.bath->edge_ratio()));
    }
}

Mat default_rho0(Context& c) {
    if (c.s.run.rho0) return *c.s.run.rho0;
    if (c.s.model.kind == ModelSpec::Kind::qubit) {
        Mat r(2, 2);
        r << 0.3, Complex(0.2, 0.1), Complex(0.2, -0.1), 0.7;
        return r;
    }
    return random_density(c.dim(), c.rng);
}

std::vector<double> time_grid(const RunSpec& r) {
    std::vector<double> t(static_cast<std::size_t>(r.nt));
    for (int i = 0; i < r.nt; ++i) t[static_cast<std::size_t>(i)] = r.t_max * i / (r.nt - 1);
    return t;
}

void trajectory_checks(Context& c, const std::vector<Mat>& rho) {
    double herm = 0, tr = 0, mineig = 0, drift = 0;
    const RVec s0 = spectrum(rho.front());
    for (const Mat& r : rho) {
        herm = std::max(herm, (r - r.adjoint()).cwiseAbs().maxCoeff());
        tr = std::max(tr, std::abs(r.trace() - 1.0));
        mineig = std::min(mineig, min_eigenvalue(r));
        drift = std::max(drift, (spectrum(r) - s0).cwiseAbs().maxCoeff());
    }
    c.below("trajectory_hermiticity", herm, c.s.run.tol);
    c.below("trajectory_trace", tr, c.s.run.tol);
    c.check("trajectory_positivity", mineig, -1e-7, mineig > -1e-7);
    double gmax = 0;
    for (double w : probe_frequencies(c)) gmax = std::max(gmax, c.fl->relaxator(w).norm());
    if (gmax == 0)
        c.below("unitary_spectrum_invariance", drift, 1e-7, "relaxator vanishes");
    else
        c.info("spectrum_drift", num(drift));
}

void run_exact_check(Context& c, const fs::path& dir) {
    const TotalSystem& ts = *c.total;
    std::uniform_real_distribution<double> re(-3 * c.max_bohr, 3 * c.max_bohr), lg(std::log(1e-3), 0.0);
    double schur = 0, trace = 0;
    for (int i = 0; i < c.s.run.n_z; ++i) {
        const Complex z(re(c.rng), std::exp(lg(c.rng)));
        const Mat l = c.rel->liouvillian(z);
        const int d2 = static_cast<int>(l.rows());
        const Mat g = (z * Mat::Identity(d2, d2) - l).inverse();
        const Mat pgp = projected_total_resolvent(ts, z);
        schur = std::max(schur, (pgp - g).norm() / pgp.norm());
        trace = std::max(trace, trace_conservation_error(l));
    }
    c.below("schur_identity", schur, 1e-9);
    c.below("trace_conservation", trace, 1e-10);

    const int ds = ts.ds(), de = ts.de();
    Mat rho_tot = c.s.run.correlated ? random_density(ds * de, c.rng) : kron(default_rho0(c), ts.rho_env());
    const Mat rs = partial_trace_env(rho_tot, ds, de);
    const Mat dcorr = rho_tot - kron(rs, ts.rho_env());
    const auto t = time_grid(c.s.run);
    const auto exact = reduced_unitary_evolution(ts, rho_tot, t);
    std::function<Mat(Complex)> corr;
    if (dcorr.norm() > 1e-14) corr = [&](Complex z) { return c.rel->initial_correlation(dcorr, z); };
    LaplaceOptions lo;
    lo.tol = c.s.run.tol;
    const auto lap = evolve_laplace_grid(*c.fl, rs, corr, t, lo);
    double dev = 0;
    for (std::size_t i = 0; i < t.size(); ++i) dev = std::max(dev, (exact[i] - lap.rho[i]).cwiseAbs().maxCoeff());
    c.below("reduced_dynamics", dev, c.s.run.tol, "unitary trace vs Laplace grid");
    c.info("laplace_error_estimate", num(lap.error_estimate));
    c.info("laplace_nodes", std::to_string(lap.nodes));
    Csv csv(dir / "trajectory.csv", rho_header(ds));
    for (std::size_t i = 0; i < t.size(); ++i) csv.row(rho_row(t[i], lap.rho[i]));
    c.out->files.push_back("trajectory.csv");
}

void run_evolve(Context& c, const fs::path& dir) {
    const Mat rho0 = default_rho0(c);
    const auto t = time_grid(c.s.run);
    const auto method = c.s.run.method;
    std::vector<Mat> lap_rho, res_rho;
    if (method != RunSpec::Method::residue) {
        LaplaceOptions lo;
        lo.tol = c.s.run.tol;
        auto r = evolve_laplace_grid(*c.fl, rho0, {}, t, lo);
        c.info("laplace_error_estimate", num(r.error_estimate));
        lap_rho = std::move(r.rho);
    }
    if (method != RunSpec::Method::laplace) res_rho = evolve_residues(effective_modes(*c.fl), rho0, t);
    if (!lap_rho.empty() && !res_rho.empty()) {
        double dev = 0;
        for (std::size_t i = 0; i < t.size(); ++i) dev = std::max(dev, (lap_rho[i] - res_rho[i]).cwiseAbs().maxCoeff());
        // the pole sum is exact only without memory; otherwise the branch-cut remainder is reported
        if (c.fl->frequency_independent())
            c.below("residue_vs_laplace", dev, c.s.run.tol);
        else
            c.info("residue_vs_laplace", num(dev) + " (frequency-dependent L, pole sum omits the background)");
    }
    const auto& rho = lap_rho.empty() ? res_rho : lap_rho;
    trajectory_checks(c, rho);
    Csv csv(dir / "trajectory.csv", rho_header(c.dim()));
    for (std::size_t i = 0; i < t.size(); ++i) csv.row(rho_row(t[i], rho[i]));
    c.out->files.push_back("trajectory.csv");
}

void write_modes(Context& c, const EffectiveModeSet& ms, const Mat& rho0, const fs::path& dir) {
    const auto amp = mode_amplitudes(ms, rho0);
    Csv csv(dir / "modes.csv", {"k", "omega_k", "delta_k", "norm_A_k"});
    for (std::size_t k = 0; k < ms.modes.size(); ++k)
        csv.row({static_cast<double>(k), ms.modes[k].omega(), ms.modes[k].delta(), amp[k].norm()});
    c.out->files.push_back("modes.csv");
}

void qubit_oracle_checks(Context& c) {
    const ModelSpec& m = c.s.model;
    const bool diag = m.qubit.s_eg == Complex(0), off = m.qubit.s_g == 0 && m.qubit.s_e == 0;
    if (m.kind != ModelSpec::Kind::qubit || m.form != QubitForm::general || c.s.run.markov || c.s.run.secular ||
        !(diag || off))
        return;
    const QubitModel qm{m.omega0, m.qubit, c.bath};
    for (const auto& row : qubit_comparison(qm)) c.below("closed_form_" + row.quantity, row.rel_dev, 1e-6);
}

void run_spectrum(Context& c, const fs::path& dir) {
    const EffectiveModeSet ms = effective_modes(*c.fl);
    c.info("modes", std::to_string(ms.modes.size()));
    c.info("zero_modes", std::to_string(ms.zero_modes));
    for (const auto& w : ms.warnings) c.info("warning", w);
    for (std::size_t k = 0; k < ms.modes.size(); ++k) {
        const auto& md = ms.modes[k];
        c.info("mode_" + std::to_string(k), "omega " + num(md.omega()) + " delta " + num(md.delta()) +
                                                  (md.flagged ? " (branch overlap low)" : ""));
    }
    write_modes(c, ms, default_rho0(c), dir);
    qubit_oracle_checks(c);
}

void run_stationary(Context& c, const fs::path& dir) {
    const StationaryResult st = stationary_state(*c.fl);
    c.info("zero_mode_multiplicity", std::to_string(st.multiplicity));
    if (st.degenerate) {
        c.info("stationary_state", "not unique, zero mode is " + std::to_string(st.multiplicity) + "-fold degenerate");
        return;
    }
    c.below("stationary_residual", st.residual, 1e-9 * std::max(1.0, c.fl->at(0.0).norm()));
    c.check("stationary_positivity", min_eigenvalue(st.rho), -1e-9, min_eigenvalue(st.rho) > -1e-9);
    Csv csv(dir / "stationary.csv", {"m", "n", "re_rho", "im_rho"});
    for (int m = 0; m < st.rho.rows(); ++m)
        for (int n = 0; n < st.rho.cols(); ++n)
            csv.row({static_cast<double>(m), static_cast<double>(n), st.rho(m, n).real(), st.rho(m, n).imag()});
    c.out->files.push_back("stationary.csv");
}

void run_pauli(Context& c, const fs::path& dir) {
    if (!c.weak) throw ScenarioError("run.kind", "pauli needs a weak-coupling model");
    const PauliRates pr = pauli_rates_weak(*c.weak);
    const PauliRates from_relaxator = pauli_rates(c.weak->relaxator(0.0), c.weak->bohr(), pr.temperature);
    c.below("pauli_rates_consistency", (pr.w - from_relaxator.w).norm() / std::max(1.0, pr.w.norm()), 1e-9,
            "weak-coupling formula vs -Gamma_rr,nn(0)");
    const BalanceReport bal = detailed_balance_check(pr, pr.temperature);
    const bool thermal = c.bath->mode() == BathMode::thermal;
    if (thermal) c.below("detailed_balance", bal.max_violation, 1e-6);
    const PauliStationary ps = stationary_pauli(pr);
    c.info("closed_classes", std::to_string(ps.classes.size()));
    if (ps.unique) {
        const RVec gibbs = gibbs_distribution(pr.energies, pr.temperature);
        const double dev = (ps.p - gibbs).cwiseAbs().maxCoeff();
        if (thermal || std::isinf(pr.temperature)) c.below("pauli_gibbs", dev, 1e-7);
    }
    Csv csv(dir / "pauli.csv", {"r", "n", "W", "balance_ratio"});
    for (const auto& row : bal.rows)
        csv.row({static_cast<double>(row.r), static_cast<double>(row.n), row.w, row.ratio});
    c.out->files.push_back("pauli.csv");
}

Mat default_observable(const Context& c, const std::optional<Mat>& given) {
    if (given) return *given;
    if (c.weak) return c.weak->couplings().front();
    return c.total->couplings().front().s;
}

void run_response(Context& c, const fs::path& dir) {
    const StationaryResult st = stationary_state(*c.fl);
    if (st.degenerate) throw std::runtime_error("response: stationary state is not unique");
    const Mat a = default_observable(c, c.s.run.a), b = default_observable(c, c.s.run.b);
    double lo = c.s.run.omega_min, hi = c.s.run.omega_max;
    if (lo == 0 && hi == 0) {
        hi = std::min(8 * std::max(1.0, c.max_bohr), 0.999 * c.fl->max_frequency());
        lo = -hi;
    }
    const int n = c.s.run.n_omega;
    std::vector<double> w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    const Susceptibility chi = chi_open(*c.fl, st.rho, a, b, w);
    double imax = 0, amax = 0;
    for (std::size_t i = 0; i < w.size(); ++i)
        if (!chi.pole[i]) {
            imax = std::max(imax, std::abs(chi.chi[i].imag()));
            amax = std::max(amax, std::abs(chi.chi[i]));
        }
    if (c.bath && std::isinf(c.bath->temperature())) c.below("infinite_temperature_chi2", imax, 1e-10);
    std::vector<double> re_kk(w.size(), std::nan("")), dev(w.size(), std::nan(""));
    if (amax > 0 && std::abs(lo + hi) < 1e-12 * hi) {
        const KKReport kk = kk_check(chi);
        c.below("kramers_kronig", kk.dev_re, 1e-3, "interior, relative to max |chi|");
        c.info("kk_edge_ratio", num(kk.edge_ratio));
        for (std::size_t i = 0; i < w.size(); ++i) {
            re_kk[i] = kk.re_from_im[i];
            dev[i] = std::abs(kk.re_from_im[i] - chi.chi[i].real());
        }
    }
    if (amax > 0) {
        const EffectiveModeSet ms = effective_modes(*c.fl);
        for (const auto& m : ms.modes) {
            if (m.omega() <= 0 || m.delta() <= 0 || m.omega() - m.delta() < lo || m.omega() + m.delta() > hi) continue;
            // decay-dominated window |w - w_k| tau_k <= 1/2
            const ResonanceFit fit = lorentz_fit(chi, m.omega() - 0.5 * m.delta(), m.omega() + 0.5 * m.delta());
            c.info("resonance_fit", "omega " + num(fit.omega_ba) + " tau " + num(fit.tau_ba) + " mode tau " +
                                        num(m.tau()) + (fit.accepted ? "" : " (rejected: " + fit.reason + ")"));
        }
    }
    Csv csv(dir / "chi.csv", {"omega", "re_chi", "im_chi", "re_chi_kk", "kk_deviation"});
    for (std::size_t i = 0; i < w.size(); ++i) csv.row({w[i], chi.chi[i].real(), chi.chi[i].imag(), re_kk[i], dev[i]});
    c.out->files.push_back("chi.csv");
}

void run_qubit_demo(Context& c, const fs::path& dir) {
    const ModelSpec& m = c.s.model;
    const QubitModel qm{m.omega0, m.qubit, c.bath};
    const bool diag = m.qubit.s_eg == Complex(0), off = m.qubit.s_g == 0 && m.qubit.s_e == 0;
    if (diag) {
        const auto d = diag_coupling_analytics(qm);
        c.info("omega_plus", num(d.omega_plus));
        c.info("tau_dec", num(d.tau_dec));
        c.info("tau_dec_gamma0", num(d.tau_dec_zero));
    }
    if (off) {
        const auto o = offdiag_coupling_analytics(qm);
        c.info("rho_e_inf", num(o.rho_e_inf));
        c.info("tau_r_diag", num(o.tau_r_diag));
        c.info("omega2", num(o.omega2));
        c.info("tau_dec", num(o.tau_dec));
        if (c.bath->mode() == BathMode::thermal)
            c.below("rho_e_canonical", std::abs(o.rho_e_inf - o.rho_e_canonical), 1e-8);
    }
    run_spectrum(c, dir);
    if (diag || off) {
        const Mat rho0 = default_rho0(c);
        const auto mk = markov_limit(*qubit_liouvillian(m.omega0, m.qubit, c.bath));
        double dev = 0;
        for (double t : time_grid(c.s.run)) {
            const Mat ode = devectorize(propagator(mk->at(0.0), t) * vectorize(rho0));
            dev = std::max(dev, (ode - markov_qubit_state(qm, rho0, t)).cwiseAbs().maxCoeff());
        }
        c.below("markov_closed_form", dev, 1e-8);
        const MarkovQubit mr = markov_qubit_rates(qm);
        c.info("markov_tau_r", num(mr.tau_r));
        if (diag) c.info("markov_tau_dec", num(mr.tau_dec));
    }
}

}  // namespace

std::string format_check(const Check& c) {
    std::string s = c.name + ": " + (c.pass ? "PASS" : "FAIL") + " (max " + num(c.value) + ", tol " + num(c.tol) + ")";
    if (!c.detail.empty()) s += " " + c.detail;
    return s;
}

RunResult run_scenario(const Scenario& s, const RunOptions& opt) {
    RunResult res;
    const fs::path dir = opt.out_dir.empty() ? fs::path(s.output.dir) : fs::path(opt.out_dir);
    fs::create_directories(dir);
    Context c(s, opt.seed.value_or(s.seed), &res);
    c.eps = opt.eps.value_or(s.run.eps);
    try {
        build(c);
        if (c.fl && s.run.kind != RunSpec::Kind::exact_check) invariant_suite(c);
        if (!opt.verify_only) {
            switch (s.run.kind) {
                case RunSpec::Kind::exact_check: run_exact_check(c, dir); break;
                case RunSpec::Kind::evolve: run_evolve(c, dir); break;
                case RunSpec::Kind::spectrum: run_spectrum(c, dir); break;
                case RunSpec::Kind::stationary: run_stationary(c, dir); break;
                case RunSpec::Kind::pauli: run_pauli(c, dir); break;
                case RunSpec::Kind::response: run_response(c, dir); break;
                case RunSpec::Kind::qubit_demo: run_qubit_demo(c, dir); break;
            }
        }
    } catch (const std::exception& e) {
        res.error = to_string(s.run.kind) + ": " + e.what();
        res.status = 3;
    }
    if (res.status == 0)
        for (const auto& ch : res.checks)
            if (!ch.pass) res.status = 1;

    std::ofstream rep(dir / "report.txt");
    rep << "run: " << to_string(s.run.kind) << (opt.verify_only ? " (verify)" : "") << '\n';
    rep << "seed: " << opt.seed.value_or(s.seed) << '\n';
    for (const auto& ch : res.checks) rep << format_check(ch) << '\n';
    for (const auto& i : res.info) rep << "info " << i << '\n';
    if (!res.error.empty()) rep << "error: " << res.error << '\n';
    rep << "result: " << (res.status == 0 ? "PASS" : "FAIL") << '\n';
    res.files.push_back("report.txt");
    return res;
}

}  // namespace relax::cli
