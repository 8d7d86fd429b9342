#include "relax/qubit.hpp"

#include "relax/spectral.hpp"

#include <boost/math/tools/toms748_solve.hpp>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace relax {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

bool is_diagonal(const QubitCoupling& s) { return s.s_eg == Complex(0); }
bool is_offdiagonal(const QubitCoupling& s) { return s.s_g == 0 && s.s_e == 0; }

double boltzmann(double w, double t) { return std::isinf(t) ? 1.0 : std::exp(-w / t); }

// All roots of f on [lo, hi] from a sign-change scan refined by TOMS 748.
template <class F>
std::vector<double> scan_roots(F f, double lo, double hi, int n = 400) {
    std::vector<double> roots;
    double x0 = lo, f0 = f(lo);
    if (f0 == 0) roots.push_back(lo);
    for (int i = 1; i <= n; ++i) {
        const double x1 = lo + (hi - lo) * i / n;
        const double f1 = f(x1);
        if (f1 == 0) {
            roots.push_back(x1);
        } else if (f0 != 0 && (f0 < 0) != (f1 < 0)) {
            boost::uintmax_t it = 100;
            auto tol = [](double a, double b) { return std::abs(a - b) <= 1e-14 * std::max(1.0, std::abs(a)); };
            const auto r = boost::math::tools::toms748_solve(f, x0, x1, f0, f1, tol, it);
            roots.push_back(0.5 * (r.first + r.second));
        }
        x0 = x1;
        f0 = f1;
    }
    return roots;
}

double closest(const std::vector<double>& xs, double target) {
    if (xs.empty()) throw std::runtime_error("qubit: no fixed point near omega0");
    return *std::min_element(xs.begin(), xs.end(),
                             [&](double a, double b) { return std::abs(a - target) < std::abs(b - target); });
}

Mat sigma_plus() {
    Mat m = Mat::Zero(2, 2);
    m(1, 0) = 1;
    return m;
}

Mat sigma_minus() {
    Mat m = Mat::Zero(2, 2);
    m(0, 1) = 1;
    return m;
}

// 2x2 coherence block in the (sigma_+, sigma_-) basis with coefficients f and h
Eigen::Matrix2cd coherence_block(const QubitModel& qm, Complex f, Complex h) {
    const Complex seg = qm.s.s_eg, sge = std::conj(qm.s.s_eg);
    Eigen::Matrix2cd m;
    m << qm.omega0 + f, -h * seg * seg, -h * sge * sge, -qm.omega0 + f;
    return m;
}

// e^{-i M t} for a 2x2 matrix
Eigen::Matrix2cd expm_2x2(const Eigen::Matrix2cd& m, double t) {
    const Complex tau = 0.5 * m.trace();
    const Eigen::Matrix2cd n = m - tau * Eigen::Matrix2cd::Identity();
    const Complex q = std::sqrt(-n.determinant());
    const Complex qt = q * t;
    const Complex sinc = std::abs(qt) < 1e-8 ? Complex(t) * (1.0 - qt * qt / 6.0) : std::sin(qt) / q;
    return std::exp(-I * tau * t) * (std::cos(qt) * Eigen::Matrix2cd::Identity() - I * sinc * n);
}

double rel(double a, double b) {
    const double scale = std::max(std::abs(a), 1e-300);
    return std::abs(a - b) / scale;
}

}  // namespace

Complex QubitModel::g(double w) const { return bath->g(w)(0, 0); }
double QubitModel::gamma(double w) const { return bath->gamma(w)(0, 0).real(); }
Complex QubitModel::h(double w) const { return g(w) - std::conj(g(-w)); }

Complex qubit_lambda_plus(const QubitModel& qm, double w) {
    const double sg = qm.s.s_g, se = qm.s.s_e, w0 = qm.omega0;
    return w0 + (se - sg) * (qm.g(w - w0) * se + std::conj(qm.g(w0 - w)) * sg);
}

Complex qubit_lambda_minus(const QubitModel& qm, double w) {
    const double sg = qm.s.s_g, se = qm.s.s_e, w0 = qm.omega0;
    return -w0 + (sg - se) * (qm.g(w + w0) * sg + std::conj(qm.g(-w - w0)) * se);
}

DiagonalAnalytics diag_coupling_analytics(const QubitModel& qm) {
    if (!is_diagonal(qm.s)) throw std::invalid_argument("diag_coupling_analytics: S_eg must vanish");
    const double w0 = qm.omega0, t = qm.temperature();
    const double sg = qm.s.s_g, se = qm.s.s_e;
    DiagonalAnalytics out;
    out.fixed_points = scan_roots([&](double w) { return qubit_lambda_plus(qm, w).real() - w; }, 0.5 * w0, 1.5 * w0);
    out.omega_plus = closest(out.fixed_points, w0);
    out.delta_plus = -qubit_lambda_plus(qm, out.omega_plus).imag();
    out.tau_dec = out.delta_plus > 0 ? 1.0 / out.delta_plus : inf;
    const double x = out.omega_plus - w0;
    const double pr = qm.gamma(x) * (se - sg) * (se - sg * boltzmann(x, t));
    out.tau_dec_printed = pr > 0 ? 1.0 / pr : inf;
    const double g0 = qm.gamma(0);
    out.no_decoherence = g0 == 0;
    out.tau_dec_zero = g0 > 0 && se != sg ? 1.0 / (g0 * (se - sg) * (se - sg)) : inf;
    return out;
}

Complex qubit_rho_e(const QubitModel& qm, double w) {
    const double w0 = qm.omega0;
    const Complex num = qm.g(w - w0) - std::conj(qm.g(-w - w0));
    const Complex den = qm.g(w + w0) - std::conj(qm.g(w0 - w)) + num;
    return num / den;
}

Complex qubit_lambda1(const QubitModel& qm, double w) {
    return std::norm(qm.s.s_eg) * (qm.h(w + qm.omega0) + qm.h(w - qm.omega0));
}

Complex qubit_f(const QubitModel& qm, double w) { return std::norm(qm.s.s_eg) * qm.h(w); }

Complex qubit_dz0(const QubitModel& qm, double w) {
    const Complex f = qubit_f(qm, w);
    const double w0 = qm.omega0;
    // sqrt(w0^2 + f^2) - w0 without cancellation
    return f * f / (std::sqrt(w0 * w0 + f * f) + w0);
}

OffDiagonalAnalytics offdiag_coupling_analytics(const QubitModel& qm) {
    if (!is_offdiagonal(qm.s)) throw std::invalid_argument("offdiag_coupling_analytics: S_g and S_e must vanish");
    if (qm.s.s_eg == Complex(0)) throw std::invalid_argument("offdiag_coupling_analytics: S_eg is zero");
    const double w0 = qm.omega0, t = qm.temperature();
    const double s2 = std::norm(qm.s.s_eg);
    OffDiagonalAnalytics out;
    out.rho_e_inf = qubit_rho_e(qm, 0).real();
    const double b = boltzmann(w0, t);
    out.rho_e_canonical = b / (1 + b);
    out.lambda1_0 = qubit_lambda1(qm, 0);
    out.tau_r_diag = -out.lambda1_0.imag() > 0 ? -1.0 / out.lambda1_0.imag() : inf;
    const double rc = 2 * s2 * qm.gamma(w0) * (1 + b);
    out.tau_r_diag_closed = rc > 0 ? 1.0 / rc : inf;

    out.fixed_points = scan_roots(
        [&](double w) { return w0 + (qubit_f(qm, w) + qubit_dz0(qm, w)).real() - w; }, 0.5 * w0, 1.5 * w0);
    out.omega2 = closest(out.fixed_points, w0);
    out.f = qubit_f(qm, out.omega2);
    out.dz0 = qubit_dz0(qm, out.omega2);
    out.delta2 = -out.f.imag() - out.dz0.imag();
    out.tau_dec = out.delta2 > 0 ? 1.0 / out.delta2 : inf;

    const Complex h = qm.h(out.omega2);
    const Complex sq = std::sqrt(w0 * w0 + out.f * out.f);
    const Complex seg = qm.s.s_eg, sge = std::conj(qm.s.s_eg);
    Complex a2 = 1, b2 = -h * sge * sge / (sq + w0);
    Complex a3 = h * seg * seg / (sq + w0), b3 = 1;
    const double n2 = std::sqrt(std::norm(a2) + std::norm(b2)), n3 = std::sqrt(std::norm(a3) + std::norm(b3));
    a2 /= n2;
    b2 /= n2;
    a3 /= n3;
    b3 /= n3;
    const Complex det = a2 * b3 - a3 * b2;
    const Complex c2 = std::conj(b3 / det), d2 = std::conj(-a3 / det);
    const Complex c3 = std::conj(-b2 / det), d3 = std::conj(a2 / det);
    const Mat sp = sigma_plus(), sm = sigma_minus();
    out.r2 = a2 * sp + b2 * sm;
    out.r3 = a3 * sp + b3 * sm;
    out.l2 = c2 * sp + d2 * sm;
    out.l3 = c3 * sp + d3 * sm;
    return out;
}

MarkovQubit markov_qubit_rates(const QubitModel& qm) {
    const double w0 = qm.omega0, t = qm.temperature();
    const double sg = qm.s.s_g, se = qm.s.s_e, s2 = std::norm(qm.s.s_eg);
    const Complex seg = qm.s.s_eg;
    const double b = boltzmann(w0, t);
    MarkovQubit m;
    m.a_e = s2 * (1 + b);
    m.b_e = seg * (sg - se * b);
    m.a_eg = (sg - se) * (sg - se * b);
    m.b_eg = (sg - se) * seg * (1 + b);
    m.rate_down = 2 * qm.gamma(w0) * s2;
    m.rate_up = 2 * qm.gamma(-w0) * s2;
    const double r = 2 * qm.gamma(w0) * m.a_e;
    m.tau_r = r > 0 ? 1.0 / r : inf;
    if (is_diagonal(qm.s)) {
        const double d = qm.gamma(w0) * m.a_eg;
        if (d < 0)
            throw std::runtime_error("markov_qubit_rates: convention conflict, negative decoherence rate " +
                                     std::to_string(d));
        m.tau_dec = d > 0 ? 1.0 / d : inf;
    } else {
        m.tau_dec = std::nan("");
    }
    return m;
}

Mat markov_qubit_state(const QubitModel& qm, const Mat& rho0, double t) {
    if (rho0.rows() != 2 || rho0.cols() != 2) throw std::invalid_argument("markov_qubit_state: rho0 must be 2x2");
    Mat out = rho0;
    if (is_diagonal(qm.s)) {
        const Complex ph = std::exp(-I * qubit_lambda_plus(qm, 0) * t);
        out(1, 0) = ph * rho0(1, 0);
        out(0, 1) = std::conj(ph) * rho0(0, 1);
        if (rho0(0, 1) != std::conj(rho0(1, 0))) out(0, 1) = std::exp(-I * qubit_lambda_minus(qm, 0) * t) * rho0(0, 1);
        return out;
    }
    if (!is_offdiagonal(qm.s))
        throw std::invalid_argument("markov_qubit_state: S must be diagonal or purely off-diagonal");
    const double w0 = qm.omega0, s2 = std::norm(qm.s.s_eg);
    const double up = qm.gamma(-w0), down = qm.gamma(w0);
    const double tr = rho0.trace().real();
    const double rate = 2 * s2 * (up + down);
    const double rc = up + down > 0 ? up / (up + down) : 0.5;
    const Complex re = rc * tr + (rho0(1, 1) - rc * tr) * std::exp(-rate * t);
    out(1, 1) = re;
    out(0, 0) = rho0.trace() - re;
    const Complex h0 = qm.h(0);
    const Eigen::Matrix2cd u = expm_2x2(coherence_block(qm, s2 * h0, h0), t);
    const Eigen::Vector2cd c = u * Eigen::Vector2cd(rho0(1, 0), rho0(0, 1));
    out(1, 0) = c(0);
    out(0, 1) = c(1);
    return out;
}

std::vector<ComparisonRow> qubit_comparison(const QubitModel& qm) {
    auto fl = qubit_liouvillian(qm.omega0, qm.s, qm.bath);
    const EffectiveModeSet ms = effective_modes(*fl);
    auto nearest = [&](double target, bool relaxing) -> const EffectiveMode& {
        const EffectiveMode* best = nullptr;
        for (const auto& m : ms.modes) {
            if (relaxing && !(m.delta() > 1e-12 * ms.span)) continue;
            if (!best || std::abs(m.omega() - target) < std::abs(best->omega() - target)) best = &m;
        }
        if (!best) throw std::runtime_error("qubit_comparison: no matching mode");
        return *best;
    };
    std::vector<ComparisonRow> rows;
    auto add = [&](std::string q, double a, double n) { rows.push_back({std::move(q), a, n, rel(a, n)}); };
    if (is_diagonal(qm.s)) {
        const auto d = diag_coupling_analytics(qm);
        const auto& m = nearest(d.omega_plus, false);
        add("omega_plus", d.omega_plus, m.omega());
        add("delta_plus", d.delta_plus, m.delta());
    } else if (is_offdiagonal(qm.s)) {
        const auto o = offdiag_coupling_analytics(qm);
        const auto st = stationary_state(*fl);
        if (st.degenerate) throw std::runtime_error("qubit_comparison: degenerate stationary state");
        add("rho_e_inf", o.rho_e_inf, st.rho(1, 1).real());
        const auto& m2 = nearest(o.omega2, false);
        add("omega2", o.omega2, m2.omega());
        add("delta2", o.delta2, m2.delta());
        const auto& m1 = nearest(0, true);
        add("delta1", -o.lambda1_0.imag(), m1.delta());
    } else {
        throw std::invalid_argument("qubit_comparison: S must be diagonal or purely off-diagonal");
    }
    return rows;
}

}  // namespace relax
