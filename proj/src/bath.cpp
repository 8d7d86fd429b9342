#include "relax/bath.hpp"

#include "relax/kernels.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace relax {

using std::numbers::pi;

FreqGrid::FreqGrid(double omega_max, int n) : omega_max_(omega_max), n_(n) {
    if (!(omega_max > 0)) throw std::invalid_argument("FreqGrid: omega_max must be positive");
    if (n < 3 || n % 2 == 0) throw std::invalid_argument("FreqGrid: n must be odd and >= 3");
    const int c = (n - 1) / 2;
    h_ = omega_max / c;
    x_.resize(n);
    for (int i = 0; i < n; ++i) x_(i) = (i - c) * h_;
}

FreqGrid FreqGrid::for_system(double max_bohr, double temperature, int n) {
    const double t = std::isfinite(temperature) ? temperature : 0.0;
    const double wmax = 8.0 * std::max({std::abs(max_bohr), 5.0 * t, 1e-6});
    // round the step up to 1, 2 or 5 x 10^k so that round frequencies land on nodes
    const double raw = 2.0 * wmax / (n - 1);
    const double dec = std::pow(10.0, std::floor(std::log10(raw)));
    double step = 10 * dec;
    for (double m : {1.0, 2.0, 5.0})
        if (m * dec >= raw * (1 - 1e-12)) {
            step = m * dec;
            break;
        }
    return FreqGrid(0.5 * step * (n - 1), n);
}

BathCorrelation::BathCorrelation(FreqGrid grid, std::vector<Mat> gamma, BathMode mode, double temperature)
    : grid_(std::move(grid)), gamma_(std::move(gamma)), mode_(mode), t_(temperature) {
    if (static_cast<int>(gamma_.size()) != grid_.size())
        throw std::invalid_argument("BathCorrelation: one gamma matrix per grid node required");
    if (mode_ == BathMode::thermal && !(t_ > 0)) throw std::invalid_argument("BathCorrelation: T must be positive");
    k_ = static_cast<int>(gamma_.front().rows());
    double scale = 0;
    for (const auto& g : gamma_) {
        if (g.rows() != k_ || g.cols() != k_) throw std::invalid_argument("BathCorrelation: inconsistent K");
        scale = std::max(scale, g.norm());
    }
    const double tol = std::max(scale, 1e-300);
    for (int i = 0; i < grid_.size(); ++i) {
        const Mat& g = gamma_[i];
        if ((g - g.adjoint()).norm() > 1e-12 * tol)
            throw std::invalid_argument("BathCorrelation: gamma is not Hermitian at node " + std::to_string(i));
        Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (g + g.adjoint()), Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-10 * tol)
            throw std::invalid_argument("BathCorrelation: gamma is not positive semi-definite at node " +
                                        std::to_string(i));
    }
    edge_ratio_ = scale > 0 ? std::max(gamma_.front().norm(), gamma_.back().norm()) / scale : 0.0;
    const double viol = symmetry_violation();
    if (mode_ == BathMode::thermal && viol > 1e-8)
        throw std::invalid_argument("BathCorrelation: KMS condition violated (" + std::to_string(viol) + ")");
    if (mode_ == BathMode::uniform && viol > 1e-12)
        throw std::invalid_argument("BathCorrelation: uniform mode requires even gamma (" + std::to_string(viol) +
                                    ")");
    gamma_chan_.assign(k_, std::vector<Vec>(k_));
    for (int k = 0; k < k_; ++k)
        for (int kp = 0; kp < k_; ++kp) gamma_chan_[k][kp] = channel(gamma_, k, kp);
    fill_s(true);
}

Vec BathCorrelation::channel(const std::vector<Mat>& v, int k, int kp) const {
    Vec out(grid_.size());
    for (int i = 0; i < grid_.size(); ++i) out(i) = v[i](k, kp);
    return out;
}

void BathCorrelation::fill_s(bool parallel) {
    s_.assign(grid_.size(), Mat::Zero(k_, k_));
    for (int k = 0; k < k_; ++k)
        for (int kp = 0; kp < k_; ++kp) {
            const Vec pv = parallel ? kernels::pv_parallel(grid_.nodes(), gamma_chan_[k][kp])
                                    : kernels::pv_serial(grid_.nodes(), gamma_chan_[k][kp]);
            for (int i = 0; i < grid_.size(); ++i) s_[i](k, kp) = pv(i) / pi;
        }
}

double BathCorrelation::symmetry_violation() const {
    const int n = grid_.size();
    double scale = 0, worst = 0;
    for (const auto& g : gamma_) scale = std::max(scale, g.cwiseAbs().maxCoeff());
    if (scale == 0) return 0;
    if (mode_ == BathMode::general) return 0;
    for (int i = (n - 1) / 2; i < n; ++i) {
        const double w = grid_.node(i);
        const Mat& plus = gamma_[i];
        const Mat& minus = gamma_[n - 1 - i];
        const double f = (mode_ == BathMode::thermal && std::isfinite(t_)) ? std::exp(-w / t_) : 1.0;
        worst = std::max(worst, (minus.transpose() - f * plus).cwiseAbs().maxCoeff());
    }
    return worst / scale;
}

Mat BathCorrelation::gamma(double w) const {
    Mat out(k_, k_);
    for (int k = 0; k < k_; ++k)
        for (int kp = 0; kp < k_; ++kp) out(k, kp) = kernels::interp_uniform(grid_.nodes(), gamma_chan_[k][kp], w);
    return out;
}

Mat BathCorrelation::s(double w) const {
    if (!covers(w))
        throw std::out_of_range("frequency " + std::to_string(w) + " outside bath grid [-" +
                                std::to_string(grid_.omega_max()) + ", " + std::to_string(grid_.omega_max()) + "]");
    const double h = grid_.step();
    const double r = (w - grid_.node(0)) / h;
    const auto j = static_cast<int>(std::llround(r));
    if (std::abs(r - j) < 1e-9) return s_[std::clamp(j, 0, grid_.size() - 1)];
    auto i = static_cast<int>(std::floor(r));
    i = std::clamp(i, 0, grid_.size() - 2);
    const double t = (w - grid_.node(i)) / h;
    return (1.0 - t) * s_[i] + t * s_[i + 1];
}

Mat BathCorrelation::g(double w) const { return s(w) - I * gamma(w); }

Complex BathCorrelation::g(Complex z, int k, int kp) const {
    if (z.imag() == 0.0) return g(z.real())(k, kp);
    return kernels::cauchy_point(grid_.nodes(), gamma_chan_[k][kp], z) / pi;
}

Mat BathCorrelation::g(Complex z) const {
    if (z.imag() == 0.0) return g(z.real());
    Mat out(k_, k_);
    for (int k = 0; k < k_; ++k)
        for (int kp = 0; kp < k_; ++kp) out(k, kp) = g(z, k, kp);
    return out;
}

Complex BathCorrelation::correlation(double t, int k, int kp) const {
    const int n = grid_.size();
    const double h = grid_.step();
    Complex sum = 0;
    for (int i = 0; i < n; ++i) {
        const double w = (i == 0 || i == n - 1) ? 0.5 * h : h;
        sum += w * gamma_[i](k, kp) * std::exp(-I * grid_.node(i) * t);
    }
    return sum / pi;
}

double BathCorrelation::correlation_time(double t_max, int nt, int k) const {
    const double c0 = std::abs(correlation(0.0, k, k));
    if (c0 == 0) throw std::runtime_error("correlation_time: C(0) = 0");
    const double dt = t_max / (nt - 1);
    const std::vector<double> vals =
        kernels::parallel_map(static_cast<std::size_t>(nt), [&](std::size_t j) {
            return std::abs(correlation(dt * double(j), k, k));
        });
    double sum = 0;
    for (int j = 0; j < nt; ++j) sum += ((j == 0 || j == nt - 1) ? 0.5 : 1.0) * vals[j];
    return sum * dt / c0;
}

double bose(double w, double temperature) { return 1.0 / std::expm1(w / temperature); }

BathCorrelation gamma_bosonic(double p, const std::function<double(double)>& kappa, double temperature,
                              const FreqGrid& grid) {
    if (!(temperature > 0)) throw std::invalid_argument("gamma_bosonic: T must be positive");
    if (!(p >= 1)) throw std::invalid_argument("gamma_bosonic: density exponent p must be >= 1");
    std::vector<Mat> gam(grid.size(), Mat::Zero(1, 1));
    for (int i = 0; i < grid.size(); ++i) {
        const double w = grid.node(i);
        const double a = std::abs(w);
        const double k2 = kappa(a) * kappa(a);
        double v;
        if (w == 0.0)
            v = (p == 1.0) ? pi * k2 * temperature : 0.0;
        else if (w > 0)
            v = pi * std::pow(a, p) * k2 * (-1.0 / std::expm1(-a / temperature));
        else
            v = pi * std::pow(a, p) * k2 / std::expm1(a / temperature);
        gam[i](0, 0) = v;
    }
    return BathCorrelation(grid, std::move(gam), BathMode::thermal, temperature);
}

BathCorrelation gamma_phenomenological(const std::function<double(double)>& gamma_pos, BathMode mode,
                                       double temperature, const FreqGrid& grid) {
    if (mode == BathMode::thermal && !(temperature > 0))
        throw std::invalid_argument("gamma_phenomenological: T must be positive");
    if (mode == BathMode::general) throw std::invalid_argument("gamma_phenomenological: mode must be thermal or uniform");
    const int n = grid.size(), c = (n - 1) / 2;
    std::vector<Mat> gam(n, Mat::Zero(1, 1));
    for (int i = c; i < n; ++i) {
        const double w = grid.node(i);
        const double v = gamma_pos(w);
        if (!(v >= 0)) throw std::invalid_argument("gamma_phenomenological: negative gamma sample at W=" + std::to_string(w));
        gam[i](0, 0) = v;
        const double f = (mode == BathMode::thermal && std::isfinite(temperature)) ? std::exp(-w / temperature) : 1.0;
        gam[n - 1 - i](0, 0) = f * v;
    }
    return BathCorrelation(grid, std::move(gam), mode, temperature);
}

BathCorrelation gamma_from_table(const std::vector<std::pair<double, double>>& samples, BathMode mode,
                                 double temperature, const FreqGrid& grid) {
    if (samples.size() < 2) throw std::invalid_argument("gamma_from_table: at least two samples required");
    auto rows = samples;
    std::sort(rows.begin(), rows.end());
    for (const auto& [w, v] : rows) {
        if (w < 0) throw std::invalid_argument("gamma_from_table: samples must have W >= 0");
        if (v < 0) throw std::invalid_argument("gamma_from_table: negative gamma sample at W=" + std::to_string(w));
    }
    auto f = [&rows](double w) {
        if (w < rows.front().first || w > rows.back().first) return 0.0;
        auto it = std::upper_bound(rows.begin(), rows.end(), std::make_pair(w, std::numeric_limits<double>::infinity()));
        if (it == rows.end()) return rows.back().second;
        if (it == rows.begin()) return rows.front().second;
        const auto& [w1, v1] = *it;
        const auto& [w0, v0] = *(it - 1);
        return w1 == w0 ? v1 : v0 + (v1 - v0) * (w - w0) / (w1 - w0);
    };
    return gamma_phenomenological(f, mode, temperature, grid);
}

BathCorrelation s_from_gamma(const BathCorrelation& bc) {
    BathCorrelation out = bc;
    out.fill_s(true);
    return out;
}

namespace {

struct EnvBasis {
    RVec e;
    Mat u;
};

EnvBasis env_basis(const TotalSystem& ts) {
    Eigen::SelfAdjointEigenSolver<Mat> es(ts.h_env());
    return {es.eigenvalues(), es.eigenvectors()};
}

}  // namespace

BathCorrelation gamma_from_env_exact(const TotalSystem& ts, double eps, const FreqGrid& grid) {
    if (!(eps > 0)) throw std::invalid_argument("gamma_from_env_exact: eps must be positive");
    const auto [e, u] = env_basis(ts);
    const int de = ts.de();
    const int kk = static_cast<int>(ts.couplings().size());
    std::vector<Mat> db(kk), dbr(kk);
    for (int k = 0; k < kk; ++k) {
        const Mat d = ts.couplings()[k].b - ts.mean_b(k) * Mat::Identity(de, de);
        db[k] = u.adjoint() * d * u;
        dbr[k] = u.adjoint() * d * ts.rho_env() * u;
    }
    std::vector<Mat> gam(grid.size(), Mat::Zero(kk, kk));
    for (int i = 0; i < grid.size(); ++i) {
        const double w = grid.node(i);
        for (int k = 0; k < kk; ++k)
            for (int kp = 0; kp < kk; ++kp) {
                Complex acc = 0;
                for (int a = 0; a < de; ++a)
                    for (int b = 0; b < de; ++b) {
                        const double x = w - (e(a) - e(b));
                        acc += db[k](b, a) * dbr[kp](a, b) * (eps / (x * x + eps * eps));
                    }
                gam[i](k, kp) = acc;
            }
        gam[i] = (0.5 * (gam[i] + gam[i].adjoint())).eval();
    }
    const BathMode mode = ts.uniform() ? BathMode::uniform : BathMode::general;
    return BathCorrelation(grid, std::move(gam), mode, infinite_temperature);
}

Mat CorrelationTable::at(double w) const {
    const int k = static_cast<int>(values.front().rows()), l = static_cast<int>(values.front().cols());
    Mat out(k, l);
    Vec chan(grid.size());
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < l; ++b) {
            for (int i = 0; i < grid.size(); ++i) chan(i) = values[i](a, b);
            out(a, b) = kernels::interp_uniform(grid.nodes(), chan, w);
        }
    return out;
}

CorrelationTable g0_from_env_exact(const TotalSystem& ts, const std::vector<Mat>& drho_env, double eps,
                                   const FreqGrid& grid) {
    if (!(eps > 0)) throw std::invalid_argument("g0_from_env_exact: eps must be positive");
    const auto [e, u] = env_basis(ts);
    const int de = ts.de();
    const int kk = static_cast<int>(ts.couplings().size());
    const int ll = static_cast<int>(drho_env.size());
    std::vector<Mat> db(kk), dr(ll);
    for (int k = 0; k < kk; ++k)
        db[k] = u.adjoint() * (ts.couplings()[k].b - ts.mean_b(k) * Mat::Identity(de, de)) * u;
    for (int l = 0; l < ll; ++l) {
        if (drho_env[l].rows() != de) throw std::invalid_argument("g0_from_env_exact: drho_env dimension mismatch");
        dr[l] = u.adjoint() * drho_env[l] * u;
    }
    CorrelationTable tab{grid, std::vector<Mat>(grid.size(), Mat::Zero(kk, ll))};
    for (int i = 0; i < grid.size(); ++i)
        for (int k = 0; k < kk; ++k)
            for (int l = 0; l < ll; ++l) {
                Complex acc = 0;
                for (int a = 0; a < de; ++a)
                    for (int b = 0; b < de; ++b)
                        acc += db[k](b, a) * dr[l](a, b) / (grid.node(i) + I * eps - (e(a) - e(b)));
                tab.values[i](k, l) = acc;
            }
    return tab;
}

}  // namespace relax
