#include "relax/response.hpp"

#include "relax/kernels.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace relax {

namespace {

constexpr double pi = 3.14159265358979323846;

Complex trace_product(const Mat& x, const Mat& b) { return x.cwiseProduct(b.transpose()).sum(); }

double rms(const std::vector<Complex>& v) {
    double s = 0;
    for (const auto& x : v) s += std::norm(x);
    return std::sqrt(s / std::max<std::size_t>(1, v.size()));
}

struct LorentzResidual {
    using Scalar = double;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
    using InputType = Eigen::VectorXd;
    using ValueType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;

    const std::vector<double>* w;
    const std::vector<Complex>* chi;

    int inputs() const { return 4; }
    int values() const { return static_cast<int>(2 * w->size()); }

    // x = (omega_ba, eta, Re c, Im c), model -c / (w - omega_ba + i eta)
    int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
        const Complex c(x(2), x(3));
        for (std::size_t i = 0; i < w->size(); ++i) {
            const Complex r = (*chi)[i] + c / Complex((*w)[i] - x(0), x(1));
            f(static_cast<Eigen::Index>(2 * i)) = r.real();
            f(static_cast<Eigen::Index>(2 * i + 1)) = r.imag();
        }
        return 0;
    }
};

}  // namespace

Susceptibility chi_open(const FreqLiouvillian& fl, const Mat& rho_inf, const Mat& a, const Mat& b,
                        const std::vector<double>& omega, bool parallel) {
    const int d = static_cast<int>(rho_inf.rows());
    const int d2 = d * d;
    {
        const Mat l0 = fl.at(0.0);
        const double res = (l0 * vectorize(rho_inf)).norm();
        if (res > 1e-8 * std::max(1.0, l0.norm()))
            throw std::invalid_argument("chi_open: rho_inf is not stationary (||L(0) rho|| = " + std::to_string(res) + ")");
    }
    const Vec y = vectorize(a * rho_inf - rho_inf * a);
    const Mat reg = I * vectorize(rho_inf) * vectorize(Mat::Identity(d, d)).adjoint();
    struct Point {
        Complex chi;
        char pole;
    };
    auto eval = [&](std::size_t i) -> Point {
        const double w = omega[i];
        const Mat m = w * Mat::Identity(d2, d2) - fl.at(w) + reg;
        Eigen::PartialPivLU<Mat> lu(m);
        if (!(lu.rcond() >= 1e-12)) return {Complex(std::nan(""), std::nan("")), 1};
        return {-trace_product(devectorize(lu.solve(y)), b), 0};
    };
    const auto pts = parallel ? kernels::parallel_map(omega.size(), eval) : kernels::serial_map(omega.size(), eval);
    Susceptibility s;
    s.omega = omega;
    for (const auto& p : pts) {
        s.chi.push_back(p.chi);
        s.pole.push_back(p.pole);
    }
    return s;
}

Susceptibility chi_kubo(const Mat& h, const Mat& rho_eq, const Mat& a, const Mat& b, const std::vector<double>& omega,
                        double eps) {
    require_hermitian(h, "chi_kubo: H");
    if (!(eps > 0)) throw std::invalid_argument("chi_kubo: eps must be positive");
    const double comm = (h * rho_eq - rho_eq * h).norm();
    if (comm > 1e-10 * std::max(1.0, h.norm()))
        throw std::invalid_argument("chi_kubo: rho_eq does not commute with H (" + std::to_string(comm) + ")");
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    const Mat& u = es.eigenvectors();
    const RVec& e = es.eigenvalues();
    const Mat y = u.adjoint() * (a * rho_eq - rho_eq * a) * u;
    const Mat be = u.adjoint() * b * u;
    const Eigen::Index d = h.rows();
    Susceptibility s;
    s.omega = omega;
    s.broadening = eps;
    for (double w : omega) {
        Complex acc = 0;
        for (Eigen::Index m = 0; m < d; ++m)
            for (Eigen::Index n = 0; n < d; ++n) acc += y(m, n) * be(n, m) / Complex(w - (e(m) - e(n)), eps);
        s.chi.push_back(-acc);
        s.pole.push_back(0);
    }
    return s;
}

std::shared_ptr<ConstantLiouvillian> kubo_regime_liouvillian(const Mat& h, const Mat& rho_eq, double eps) {
    const Eigen::Index d = h.rows();
    const Mat pi_op = Mat::Identity(d * d, d * d) - vectorize(rho_eq) * vectorize(Mat::Identity(d, d)).adjoint();
    const Mat lh = commutator_superop(h);
    return std::make_shared<ConstantLiouvillian>(lh - I * eps * pi_op, lh);
}

double default_kubo_eps(const Mat& h) {
    Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
    const RVec& e = es.eigenvalues();
    const double span = std::max(1.0, e(e.size() - 1) - e(0));
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 1; i < e.size(); ++i)
        if (e(i) - e(i - 1) > 1e-9 * span) gap = std::min(gap, e(i) - e(i - 1));
    return std::isfinite(gap) ? 1e-3 * gap : 1e-3;
}

KKReport kk_check(const Susceptibility& chi, double interior_fraction) {
    const std::size_t n = chi.omega.size();
    if (n < 3 || n % 2 == 0) throw std::invalid_argument("kk_check: need an odd number of grid points");
    const double h = (chi.omega.back() - chi.omega.front()) / static_cast<double>(n - 1);
    RVec x(static_cast<Eigen::Index>(n));
    Vec re(static_cast<Eigen::Index>(n)), im(static_cast<Eigen::Index>(n));
    double cmax = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(chi.omega[i] - (chi.omega.front() + static_cast<double>(i) * h)) > 1e-9 * std::abs(h))
            throw std::invalid_argument("kk_check: grid is not uniform");
        if (!std::isfinite(chi.chi[i].real()) || !std::isfinite(chi.chi[i].imag()))
            throw std::invalid_argument("kk_check: chi has a pole on the grid");
        x(static_cast<Eigen::Index>(i)) = chi.omega[i];
        re(static_cast<Eigen::Index>(i)) = chi.chi[i].real();
        im(static_cast<Eigen::Index>(i)) = chi.chi[i].imag();
        cmax = std::max(cmax, std::abs(chi.chi[i]));
    }
    const Vec pv_im = kernels::pv_parallel(x, im);
    const Vec pv_re = kernels::pv_parallel(x, re);
    KKReport rep;
    rep.edge_ratio = cmax > 0 ? std::max(std::abs(chi.chi.front()), std::abs(chi.chi.back())) / cmax : 0.0;
    const double wmax = std::max(std::abs(chi.omega.front()), std::abs(chi.omega.back()));
    for (std::size_t i = 0; i < n; ++i) {
        const auto j = static_cast<Eigen::Index>(i);
        rep.re_from_im.push_back(-pv_im(j).real() / pi);
        rep.im_from_re.push_back(pv_re(j).real() / pi);
        if (cmax == 0 || std::abs(chi.omega[i]) > interior_fraction * wmax) continue;
        rep.dev_re = std::max(rep.dev_re, std::abs(rep.re_from_im.back() - re(j).real()) / cmax);
        rep.dev_im = std::max(rep.dev_im, std::abs(rep.im_from_re.back() - im(j).real()) / cmax);
    }
    rep.max_deviation = std::max(rep.dev_re, rep.dev_im);
    return rep;
}

DissipativePart chi_dissipative(const FreqLiouvillian& fl, const Mat& rho_inf, const Mat& a, const Mat& b,
                                double omega) {
    const auto dec = biorth_eigendecompose(fl.at(omega));
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (rho_inf + rho_inf.adjoint()));
    const Mat& v = es.eigenvectors();
    const RVec& p = es.eigenvalues();
    const Eigen::Index d = rho_inf.rows();
    const double scale = std::max(1.0, a.norm() * b.norm());
    DissipativePart out;
    out.omega = omega;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < dec.size(); ++k) {
        DissipativePart::Mode md;
        md.lambda = dec.eigenvalues(k);
        const Mat lk = dec.left[k].adjoint();
        const Mat c = v.adjoint() * (lk * a - a * lk) * v;
        const Complex trb = trace_product(dec.right[k], b);
        Complex total = 0;
        for (Eigen::Index m = 0; m < d; ++m) {
            md.per_m.push_back(p(m) * c(m, m) * trb);
            total += md.per_m.back();
        }
        if (std::abs(total) > 1e-14 * scale) {
            md.chi2 = (-total / (omega - md.lambda)).imag();
            const double delta = -md.lambda.imag();
            md.resonance = delta > 0 ? total.real() / delta : std::numeric_limits<double>::infinity();
        }
        out.chi2 += md.chi2;
        if (std::abs(md.lambda.real() - omega) < best && std::abs(total) > 1e-14 * scale) {
            best = std::abs(md.lambda.real() - omega);
            out.nearest = k;
        }
        out.modes.push_back(std::move(md));
    }
    return out;
}

ResonanceFit lorentz_fit(const Susceptibility& chi, double lo, double hi, double max_residual) {
    std::vector<double> w;
    std::vector<Complex> c;
    for (std::size_t i = 0; i < chi.omega.size(); ++i)
        if (chi.omega[i] >= lo && chi.omega[i] <= hi && std::isfinite(std::abs(chi.chi[i]))) {
            w.push_back(chi.omega[i]);
            c.push_back(chi.chi[i]);
        }
    ResonanceFit fit;
    if (w.size() < 4) {
        fit.reason = "fewer than 4 points in the window";
        return fit;
    }
    // 1/chi = alpha w + beta with alpha = -1/c0, beta = (w_BA - i eta)/c0
    Mat m(static_cast<Eigen::Index>(w.size()), 2);
    Vec rhs(static_cast<Eigen::Index>(w.size()));
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (std::abs(c[i]) == 0) {
            fit.reason = "chi vanishes in the window";
            return fit;
        }
        m(static_cast<Eigen::Index>(i), 0) = w[i];
        m(static_cast<Eigen::Index>(i), 1) = 1.0;
        rhs(static_cast<Eigen::Index>(i)) = 1.0 / c[i];
    }
    const Vec ab = m.colPivHouseholderQr().solve(rhs);
    const Complex c0 = -1.0 / ab(0);
    const Complex pole = -ab(1) / ab(0);
    Eigen::VectorXd x(4);
    x << pole.real(), -pole.imag(), c0.real(), c0.imag();
    if (!x.allFinite()) {
        fit.reason = "linear stage produced non-finite parameters (no resonance in the window)";
        return fit;
    }
    LorentzResidual f{&w, &c};
    Eigen::NumericalDiff<LorentzResidual> nd(f);
    Eigen::LevenbergMarquardt<Eigen::NumericalDiff<LorentzResidual>> lm(nd);
    lm.parameters.xtol = 1e-15;
    lm.parameters.ftol = 1e-15;
    lm.parameters.maxfev = 2000;
    lm.minimize(x);

    fit.omega_ba = x(0);
    fit.tau_ba = 1.0 / x(1);
    fit.strength = Complex(x(2), x(3));
    std::vector<Complex> diff(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) diff[i] = c[i] + fit.strength / Complex(w[i] - x(0), x(1));
    const double denom = rms(c);
    fit.residual = denom > 0 ? rms(diff) / denom : std::numeric_limits<double>::infinity();
    if (!x.allFinite() || !std::isfinite(fit.residual)) {
        fit.reason = "non-finite fit";
    } else if (!(x(1) > 0)) {
        fit.reason = "non-positive width";
    } else if (fit.residual > max_residual) {
        fit.reason = "residual " + std::to_string(fit.residual) + " above " + std::to_string(max_residual);
    } else {
        fit.accepted = true;
    }
    return fit;
}

}  // namespace relax
