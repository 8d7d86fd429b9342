#include "relax/spectral.hpp"

#include "relax/kernels.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace relax {

namespace {

constexpr double pi = 3.14159265358979323846;

double spectral_radius(const Mat& l) {
    Eigen::ComplexEigenSolver<Mat> es(l, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

// |(l_prev|r_j)| ||r_prev|| / ||r_j||, equal to 1 when r_j = r_prev
double branch_overlap(const Mat& l_prev, const Mat& r_prev, const Mat& r_j) {
    return std::abs(hs_inner(l_prev, r_j)) * r_prev.norm() / r_j.norm();
}

struct Pick {
    int j = -1;
    double overlap = 0;
};

Pick follow(const BiorthogonalDecomposition& d, const Mat& l_prev, const Mat& r_prev, double cluster_tol) {
    Pick best;
    std::vector<double> ov(d.size());
    for (int j = 0; j < d.size(); ++j) {
        ov[j] = branch_overlap(l_prev, r_prev, d.right[j]);
        if (ov[j] > best.overlap) best = {j, ov[j]};
    }
    // inside a degenerate cluster the eigenvectors are an arbitrary basis; judge the cluster as a whole
    double agg = 0;
    for (int j = 0; j < d.size(); ++j)
        if (std::abs(d.eigenvalues(j) - d.eigenvalues(best.j)) <= cluster_tol) agg += ov[j] * ov[j];
    best.overlap = std::max(best.overlap, std::sqrt(agg));
    return best;
}

}  // namespace

Mat BiorthogonalDecomposition::reconstruct() const {
    const int n = size();
    const Eigen::Index d2 = right.empty() ? 0 : right[0].size();
    Mat out = Mat::Zero(d2, d2);
    for (int k = 0; k < n; ++k) out += eigenvalues(k) * vectorize(right[k]) * vectorize(left[k]).adjoint();
    return out;
}

BiorthogonalDecomposition biorth_eigendecompose(const Mat& l, double max_condition) {
    require_square(l, "biorth_eigendecompose");
    const Eigen::Index n = l.rows();
    BiorthogonalDecomposition out;
    out.right.resize(n);
    out.left.resize(n);
    if (is_hermitian(l, 1e-14)) {
        Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (l + l.adjoint()));
        out.eigenvalues = es.eigenvalues().cast<Complex>();
        for (Eigen::Index k = 0; k < n; ++k) {
            out.right[k] = devectorize(es.eigenvectors().col(k));
            out.left[k] = out.right[k];
        }
        return out;
    }
    Eigen::ComplexEigenSolver<Mat> es(l);
    if (es.info() != Eigen::Success) throw std::runtime_error("biorth_eigendecompose: eigen solver failed");
    const Mat& v = es.eigenvectors();
    Eigen::JacobiSVD<Mat> svd(v);
    const auto& sv = svd.singularValues();
    out.condition = sv(n - 1) > 0 ? sv(0) / sv(n - 1) : std::numeric_limits<double>::infinity();
    if (!(out.condition <= max_condition))
        throw std::runtime_error("biorth_eigendecompose: eigenvector matrix condition " +
                                 std::to_string(out.condition) + " exceeds " + std::to_string(max_condition) +
                                 " (defective or nearly defective L)");
    const Mat vinv = v.partialPivLu().inverse();
    out.eigenvalues = es.eigenvalues();
    for (Eigen::Index k = 0; k < n; ++k) {
        out.right[k] = devectorize(v.col(k));
        out.left[k] = devectorize(vinv.row(k).adjoint());
    }
    return out;
}

Vec EffectiveModeSet::frequencies() const {
    Vec z(static_cast<Eigen::Index>(modes.size()));
    for (std::size_t k = 0; k < modes.size(); ++k) z(static_cast<Eigen::Index>(k)) = modes[k].z;
    return z;
}

EffectiveModeSet effective_modes(const FreqLiouvillian& fl, const ModeOptions& opt) {
    const auto d0 = biorth_eigendecompose(fl.at(0.0));
    const int n = d0.size();
    EffectiveModeSet out;
    out.span = std::max(1.0, d0.eigenvalues.cwiseAbs().maxCoeff());
    const double span = out.span;
    const double ctol = 1e-8 * span;
    const double wmax = fl.max_frequency();

    struct Branch {
        double w;
        Mat l, r;
        double min_overlap = 1;
        int iterations = 0;
    };
    std::vector<Branch> br(n);
    for (int k = 0; k < n; ++k) {
        Branch b{d0.eigenvalues(k).real(), d0.left[k], d0.right[k]};
        if (fl.frequency_independent()) {
            br[k] = b;
            continue;
        }
        bool done = false;
        for (int it = 1; it <= opt.max_iter; ++it) {
            if (std::abs(b.w) > wmax)
                throw std::out_of_range("effective_modes: branch " + std::to_string(k) + " left the frequency range at w=" +
                                        std::to_string(b.w));
            const auto d = biorth_eigendecompose(fl.at(b.w));
            const Pick p = follow(d, b.l, b.r, ctol);
            b.min_overlap = std::min(b.min_overlap, p.overlap);
            b.l = d.left[p.j];
            b.r = d.right[p.j];
            b.iterations = it;
            const double re = d.eigenvalues(p.j).real();
            if (std::abs(re - b.w) <= opt.tol * span) {
                done = true;
                break;
            }
            b.w = (1 - opt.alpha) * b.w + opt.alpha * re;
        }
        if (!done)
            throw std::runtime_error("effective_modes: branch " + std::to_string(k) + " did not converge in " +
                                     std::to_string(opt.max_iter) + " iterations (last w=" + std::to_string(b.w) + ")");
        br[k] = std::move(b);
    }

    // branches at the same omega share one decomposition and get distinct eigenvalue indices
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return br[a].w < br[b].w; });
    out.modes.resize(n);
    const double same_w = std::max(1e-9 * span, 100 * opt.tol * span);
    for (int s = 0; s < n;) {
        int e = s + 1;
        while (e < n && br[order[e]].w - br[order[e - 1]].w <= same_w) ++e;
        double w = 0;
        for (int i = s; i < e; ++i) w += br[order[i]].w;
        w /= (e - s);
        const auto d = fl.frequency_independent() ? d0 : biorth_eigendecompose(fl.at(w));

        struct Cand {
            double ov;
            int branch, j;
        };
        std::vector<Cand> cands;
        for (int i = s; i < e; ++i)
            for (int j = 0; j < d.size(); ++j) {
                const int k = order[i];
                const double ov = fl.frequency_independent() ? (j == k ? 1.0 : 0.0)
                                                             : branch_overlap(br[k].l, br[k].r, d.right[j]);
                cands.push_back({ov, k, j});
            }
        std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.ov > b.ov; });
        std::vector<char> used_b(n, 0), used_j(d.size(), 0);
        for (const auto& c : cands) {
            if (used_b[c.branch] || used_j[c.j]) continue;
            used_b[c.branch] = used_j[c.j] = 1;
            EffectiveMode m;
            m.z = d.eigenvalues(c.j);
            m.right = d.right[c.j];
            m.left = d.left[c.j];
            m.start = c.branch;
            m.iterations = br[c.branch].iterations;
            m.overlap = std::min(br[c.branch].min_overlap, fl.frequency_independent() ? 1.0 : c.ov);
            m.flagged = m.overlap < opt.overlap_flag;
            if (std::abs(m.z.real() - w) > 1e-6 * span)
                out.warnings.push_back("branch " + std::to_string(c.branch) + " collapsed onto another mode at w=" +
                                       std::to_string(w) + "; reassigned to an eigenvalue off the fixed point");
            out.modes[c.branch] = std::move(m);
        }
        s = e;
    }

    for (int k = 0; k < n; ++k) {
        auto& m = out.modes[k];
        if (!fl.frequency_independent()) {
            const double h = opt.fd_rel * span;
            const double w = m.z.real();
            const Mat dl = (fl.at(w + h) - fl.at(w - h)) / (2 * h);
            m.dlambda = vectorize(m.left).dot(dl * vectorize(m.right));
        }
        m.c = 1.0 / (1.0 - m.dlambda);
        if (std::abs(m.z) <= ctol) ++out.zero_modes;
        if (m.delta() < -1e-10 * span)
            out.warnings.push_back("mode " + std::to_string(k) + " has negative width " + std::to_string(m.delta()));
        if (m.flagged)
            out.warnings.push_back("mode " + std::to_string(k) + " branch identity uncertain (overlap " +
                                   std::to_string(m.overlap) + ")");
    }
    return out;
}

std::vector<Mat> mode_amplitudes(const EffectiveModeSet& ms, const Mat& rho0) {
    std::vector<Mat> b;
    b.reserve(ms.modes.size());
    for (const auto& m : ms.modes) b.push_back(m.c * hs_inner(m.left, rho0) * m.right);
    return b;
}

std::vector<Mat> evolve_residues(const EffectiveModeSet& ms, const Mat& rho0, const std::vector<double>& times) {
    const auto b = mode_amplitudes(ms, rho0);
    std::vector<Mat> out;
    out.reserve(times.size());
    for (double t : times) {
        Mat s = Mat::Zero(rho0.rows(), rho0.cols());
        for (std::size_t k = 0; k < b.size(); ++k) s += std::exp(-I * ms.modes[k].z * t) * b[k];
        out.push_back(0.5 * (s + s.adjoint()));
    }
    return out;
}

LaplaceResult evolve_laplace_grid(const FreqLiouvillian& fl, const Mat& rho0,
                                  const std::function<Mat(Complex)>& corr, const std::vector<double>& times,
                                  const LaplaceOptions& opt) {
    if (times.empty()) return {};
    const double t_max = *std::max_element(times.begin(), times.end());
    if (*std::min_element(times.begin(), times.end()) < 0)
        throw std::invalid_argument("evolve_laplace_grid: negative time");
    LaplaceResult res;
    res.eps = opt.eps > 0 ? opt.eps : 1.0 / std::max(1.0, t_max);
    res.step = opt.step > 0 ? opt.step : 2 * pi * res.eps / 18;
    const double lnorm = std::max(1.0, spectral_radius(fl.at(Complex(0, res.eps))));
    const double kappa = opt.kappa > 0 ? opt.kappa : lnorm;
    double width = opt.width;
    if (!(width > 0)) {
        width = 150 * lnorm;
        if (std::isfinite(fl.max_frequency())) width = std::max(width, 10 * (fl.max_frequency() + lnorm));
    }
    long half = static_cast<long>(std::ceil(width / res.step));
    if (half % 2) ++half;
    res.width = half * res.step;
    res.nodes = static_cast<int>(2 * half + 1);

    const int d = static_cast<int>(rho0.rows());
    const int d2 = d * d;
    const Vec r0 = vectorize(rho0);
    const Complex tr0 = rho0.trace();
    auto rhs = [&](Complex z) -> Vec { return corr ? Vec(r0 + vectorize(corr(z))) : r0; };
    auto f_of = [&](Complex z) -> Vec {
        const Mat a = z * Mat::Identity(d2, d2) - fl.at(z);
        return a.partialPivLu().solve(rhs(z));
    };

    // r(z) = z^2 F - z rho0 ~ c2 + c3/z + ... + c6/z^4, fitted along the imaginary axis
    constexpr int nfit = 5;
    const std::vector<double> ys{1, 1.5, 2, 3, 4, 6, 8, 12};
    Mat basis(static_cast<Eigen::Index>(ys.size()), nfit);
    Mat rvals(static_cast<Eigen::Index>(ys.size()), d2);
    for (std::size_t i = 0; i < ys.size(); ++i) {
        const Complex z(0, ys[i] * res.width);
        const Vec f = f_of(z);
        rvals.row(static_cast<Eigen::Index>(i)) = (z * z * f - z * r0).transpose();
        for (int m = 0; m < nfit; ++m) basis(static_cast<Eigen::Index>(i), m) = std::pow(res.width / z, m);
    }
    const Mat dfit = basis.colPivHouseholderQr().solve(rvals);
    constexpr int nasym = nfit + 1;
    std::vector<Vec> c(nasym + 1);
    c[1] = r0;
    for (int m = 0; m < nfit; ++m) c[m + 2] = dfit.row(m).transpose() * std::pow(res.width, m);
    // re-expand sum c_n / z^n around -i kappa: a_N = sum_n c_n C(N-1, N-n) (i kappa)^(N-n)
    std::vector<Vec> a(nasym + 1, Vec::Zero(d2));
    auto binom = [](int nn, int k) {
        double r = 1;
        for (int i = 1; i <= k; ++i) r = r * (nn - k + i) / i;
        return r;
    };
    for (int nn = 1; nn <= nasym; ++nn)
        for (int m = 1; m <= nn; ++m) a[nn] += c[m] * binom(nn - 1, nn - m) * std::pow(I * kappa, nn - m);
    auto asym = [&](Complex z) {
        Vec s = Vec::Zero(d2);
        for (int nn = 1; nn <= nasym; ++nn) s += a[nn] / std::pow(z + I * kappa, nn);
        return s;
    };

    auto node = [&](std::size_t j) -> Vec {
        const Complex z(-res.width + static_cast<double>(j) * res.step, res.eps);
        return f_of(z) - asym(z);
    };
    const auto rem = opt.parallel ? kernels::parallel_map(static_cast<std::size_t>(res.nodes), node)
                                  : kernels::serial_map(static_cast<std::size_t>(res.nodes), node);

    const double tail_amp = std::max(rem.front().norm(), rem.back().norm()) * res.width / 6;
    res.rho.reserve(times.size());
    for (double t : times) {
        Vec full = Vec::Zero(d2), coarse = Vec::Zero(d2);
        for (int j = 0; j < res.nodes; ++j) {
            const double x = -res.width + j * res.step;
            const double w = (j == 0 || j == res.nodes - 1) ? 0.5 : 1.0;
            const Vec term = std::exp(Complex(0, -x * t)) * rem[static_cast<std::size_t>(j)];
            full += w * term;
            if (j % 2 == 0) coarse += 2 * w * term;
        }
        const Complex pref = I / (2 * pi) * std::exp(res.eps * t) * res.step;
        full *= pref;
        coarse *= pref;
        Vec v = full;
        double fact = 1;
        for (int nn = 1; nn <= nasym; ++nn) {
            if (nn > 1) fact *= (nn - 1);
            v += a[nn] * std::pow(Complex(0, -t), nn - 1) * std::exp(-kappa * t) / fact;
        }
        const double est = (full - coarse).norm() * std::exp(-pi * res.eps / res.step) +
                           2 * tail_amp * std::exp(res.eps * t) / (2 * pi);
        res.error_estimate = std::max(res.error_estimate, est);
        // Tr G(z) x = Tr x / z, so the aliasing error of the z = 0 pole, e^{-2 pi eps / h}, is known
        // exactly in the trace direction; corr(z) is traceless
        Mat out = devectorize(v);
        out += ((tr0 - out.trace()) / double(d)) * Mat::Identity(d, d);
        res.rho.push_back(out);
    }
    if (res.error_estimate > opt.tol)
        throw std::runtime_error("evolve_laplace_grid: error estimate " + std::to_string(res.error_estimate) +
                                 " exceeds tolerance " + std::to_string(opt.tol));
    return res;
}

StationaryResult stationary_state(const FreqLiouvillian& fl, double rel_threshold) {
    const Mat l0 = fl.at(0.0);
    Eigen::JacobiSVD<Mat> svd(l0, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const Eigen::Index n = sv.size();
    const double thr = rel_threshold * std::max(sv(0), std::numeric_limits<double>::min());
    StationaryResult out;
    for (Eigen::Index i = n - 1; i >= 0 && sv(i) <= thr; --i) {
        out.null_basis.push_back(devectorize(svd.matrixV().col(i)));
        ++out.multiplicity;
    }
    if (out.multiplicity == 0) throw std::runtime_error("stationary_state: L(0) has no null vector");
    if (out.multiplicity > 1) {
        out.degenerate = true;
        return out;
    }
    Mat rho = out.null_basis[0];
    const Complex tr = rho.trace();
    if (std::abs(tr) < 1e-12) throw std::runtime_error("stationary_state: null vector is traceless");
    rho /= tr;
    rho = 0.5 * (rho + rho.adjoint());
    rho /= rho.trace().real();
    out.rho = rho;
    out.residual = (l0 * vectorize(rho)).norm();
    return out;
}

Mat resolvent_state(const FreqLiouvillian& fl, const Mat& rho0_z, Complex z) {
    const int d2 = static_cast<int>(rho0_z.size());
    const Mat a = z * Mat::Identity(d2, d2) - fl.at(z);
    Eigen::PartialPivLU<Mat> lu(a);
    if (!(lu.rcond() > 1e-14)) throw std::runtime_error("resolvent_state: z - L(z) is singular");
    return I * devectorize(lu.solve(vectorize(rho0_z)));
}

std::shared_ptr<ConstantLiouvillian> liouvillian_from_spectrum(const std::vector<Complex>& eigenvalues,
                                                               const std::vector<Mat>& right, const Mat& l_p) {
    if (eigenvalues.size() != right.size() || right.empty())
        throw std::invalid_argument("liouvillian_from_spectrum: need one eigen-operator per eigenvalue");
    const auto n = static_cast<Eigen::Index>(right.size());
    Mat v(right[0].size(), n);
    for (Eigen::Index k = 0; k < n; ++k) v.col(k) = vectorize(right[static_cast<std::size_t>(k)]);
    if (v.rows() != n) throw std::invalid_argument("liouvillian_from_spectrum: eigen-operators do not span");
    Eigen::PartialPivLU<Mat> lu(v);
    if (!(lu.rcond() > 1e-12)) throw std::invalid_argument("liouvillian_from_spectrum: eigen-operators are dependent");
    Vec lam(n);
    for (Eigen::Index k = 0; k < n; ++k) lam(k) = eigenvalues[static_cast<std::size_t>(k)];
    return std::make_shared<ConstantLiouvillian>(v * lam.asDiagonal() * lu.inverse(), l_p);
}

}  // namespace relax
