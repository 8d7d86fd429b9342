#include "relax/exact.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace relax {

TotalSystem::TotalSystem(Mat h, Mat h_env, std::vector<Coupling> couplings, std::optional<Mat> rho_env)
    : h_(std::move(h)), h_env_(std::move(h_env)), couplings_(std::move(couplings)) {
    require_hermitian(h_, "TotalSystem: H");
    require_hermitian(h_env_, "TotalSystem: H_env");
    for (std::size_t k = 0; k < couplings_.size(); ++k) {
        const std::string tag = "TotalSystem: couplings[" + std::to_string(k) + "]";
        require_hermitian(couplings_[k].s, tag + ".S");
        require_hermitian(couplings_[k].b, tag + ".B");
        if (couplings_[k].s.rows() != h_.rows()) throw std::invalid_argument(tag + ".S: dimension mismatch");
        if (couplings_[k].b.rows() != h_env_.rows()) throw std::invalid_argument(tag + ".B: dimension mismatch");
    }
    const int de = static_cast<int>(h_env_.rows());
    if (static_cast<long>(dim()) * dim() > 4096)
        throw std::invalid_argument("TotalSystem: total Liouville dimension exceeds 4096");
    if (rho_env) {
        rho_env_ = *rho_env;
        require_hermitian(rho_env_, "TotalSystem: rho_env");
        if (rho_env_.rows() != de) throw std::invalid_argument("TotalSystem: rho_env dimension mismatch");
        if (std::abs(rho_env_.trace() - Complex(1.0)) > 1e-12)
            throw std::invalid_argument("TotalSystem: rho_env is not normalized");
        if ((h_env_ * rho_env_ - rho_env_ * h_env_).norm() > 1e-10 * std::max(1.0, h_env_.norm()))
            throw std::invalid_argument("TotalSystem: rho_env is not stationary under H_env");
        uniform_ = (rho_env_ - Mat::Identity(de, de) / double(de)).norm() < 1e-14;
    } else {
        rho_env_ = Mat::Identity(de, de) / double(de);
        uniform_ = true;
    }
}

Mat TotalSystem::h_tot() const {
    const int ds_ = ds(), de_ = de();
    Mat h = kron(h_, Mat::Identity(de_, de_)) + kron(Mat::Identity(ds_, ds_), h_env_);
    for (const auto& c : couplings_) h += kron(c.s, c.b);
    return h;
}

Complex TotalSystem::mean_b(int k) const { return (couplings_.at(k).b * rho_env_).trace(); }

Mat embed_superop(const TotalSystem& ts) {
    const int ds = ts.ds(), de = ts.de(), d = ts.dim();
    Mat e = Mat::Zero(Eigen::Index(d) * d, Eigen::Index(ds) * ds);
    for (int i = 0; i < ds; ++i)
        for (int j = 0; j < ds; ++j)
            for (int a = 0; a < de; ++a)
                for (int b = 0; b < de; ++b)
                    e(Eigen::Index(i * de + a) * d + (j * de + b), i * ds + j) = ts.rho_env()(a, b);
    return e;
}

Mat reduce_superop(const TotalSystem& ts) {
    const int ds = ts.ds(), de = ts.de(), d = ts.dim();
    Mat r = Mat::Zero(Eigen::Index(ds) * ds, Eigen::Index(d) * d);
    for (int i = 0; i < ds; ++i)
        for (int j = 0; j < ds; ++j)
            for (int a = 0; a < de; ++a) r(i * ds + j, Eigen::Index(i * de + a) * d + (j * de + a)) = 1.0;
    return r;
}

ProjectorPair build_projector(const TotalSystem& ts) {
    ProjectorPair pp;
    pp.p = embed_superop(ts) * reduce_superop(ts);
    pp.q = Mat::Identity(pp.p.rows(), pp.p.cols()) - pp.p;
    pp.l_tot = commutator_superop(ts.h_tot());
    pp.l_p = pp.p * pp.l_tot * pp.p;
    pp.l_pq = pp.p * pp.l_tot * pp.q;
    pp.l_qp = pp.q * pp.l_tot * pp.p;
    pp.l_q = pp.q * pp.l_tot * pp.q;
    return pp;
}

HamiltonianBlocks hamiltonian_blocks(const TotalSystem& ts) {
    const int ds = ts.ds(), de = ts.de(), d = ts.dim();
    HamiltonianBlocks hb;
    hb.h_p = ts.h();
    Mat v_delta = Mat::Zero(d, d);
    std::vector<Mat> delta_b;
    for (std::size_t k = 0; k < ts.couplings().size(); ++k) {
        const auto& c = ts.couplings()[k];
        const Complex mb = ts.mean_b(static_cast<int>(k));
        hb.h_p += mb * c.s;
        delta_b.push_back(c.b - mb * Mat::Identity(de, de));
        v_delta += kron(c.s, delta_b.back());
    }
    hb.l_p = commutator_superop(hb.h_p);

    hb.l_qp = Mat::Zero(Eigen::Index(d) * d, Eigen::Index(ds) * ds);
    for (int i = 0; i < ds; ++i)
        for (int j = 0; j < ds; ++j) {
            Mat rho = Mat::Zero(ds, ds);
            rho(i, j) = 1.0;
            Mat x = Mat::Zero(d, d);
            for (std::size_t k = 0; k < delta_b.size(); ++k) {
                const Mat& s = ts.couplings()[k].s;
                x += kron(s * rho, delta_b[k] * ts.rho_env()) - kron(rho * s, ts.rho_env() * delta_b[k]);
            }
            hb.l_qp.col(i * ds + j) = vectorize(x);
        }

    const Mat p = embed_superop(ts) * reduce_superop(ts);
    const Mat q = Mat::Identity(p.rows(), p.cols()) - p;
    hb.l_pq = reduce_superop(ts) * commutator_superop(v_delta) * q;
    hb.l_q = q * commutator_superop(ts.h_tot()) * q;
    return hb;
}

ExactRelaxator::ExactRelaxator(const TotalSystem& ts) : ts_(ts) {
    embed_ = embed_superop(ts_);
    reduce_ = reduce_superop(ts_);
    p_ = embed_ * reduce_;
    q_ = Mat::Identity(p_.rows(), p_.cols()) - p_;
    l_tot_ = commutator_superop(ts_.h_tot());
    l_p_sys_ = reduce_ * l_tot_ * embed_;
    q_l_e_ = q_ * l_tot_ * embed_;
    r_l_q_ = reduce_ * l_tot_ * q_;

    if (ts_.uniform()) {
        Eigen::SelfAdjointEigenSolver<Mat> hes(ts_.h_tot(), Eigen::EigenvaluesOnly);
        const double span = hes.eigenvalues().maxCoeff() - hes.eigenvalues().minCoeff();
        const double sigma = 4.0 * span + 10.0;
        Mat m = q_ * l_tot_ * q_ + sigma * p_;
        m = 0.5 * (m + m.adjoint()).eval();
        Eigen::SelfAdjointEigenSolver<Mat> es(m);
        std::vector<Eigen::Index> keep;
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
            if (es.eigenvalues()(i) < 0.5 * sigma) keep.push_back(i);
        const Eigen::Index nq = static_cast<Eigen::Index>(keep.size());
        if (nq != p_.rows() - Eigen::Index(ts_.ds()) * ts_.ds())
            throw std::runtime_error("ExactRelaxator: Q-subspace separation failed");
        q_eig_.resize(nq);
        vq_.resize(m.rows(), nq);
        for (Eigen::Index c = 0; c < nq; ++c) {
            q_eig_(c) = es.eigenvalues()(keep[c]);
            vq_.col(c) = es.eigenvectors().col(keep[c]);
        }
        u_ = r_l_q_ * vq_;
        w_ = vq_.adjoint() * q_l_e_;
    }
}

bool ExactRelaxator::spectral_ok(Method m) const {
    if (m == Method::direct) return false;
    if (m == Method::spectral && !ts_.uniform())
        throw std::invalid_argument("ExactRelaxator: spectral method requires uniform rho_env");
    return ts_.uniform();
}

Mat ExactRelaxator::q_resolvent_apply(Complex z, const Mat& rhs, Method method) const {
    // returns G_Q(z) rhs for Q-space rhs (total space columns)
    if (spectral_ok(method)) {
        Mat y = vq_.adjoint() * rhs;
        for (Eigen::Index i = 0; i < y.rows(); ++i) y.row(i) /= (z - q_eig_(i));
        return vq_ * y;
    }
    const Eigen::Index n = p_.rows();
    Mat a = q_ * (z * Mat::Identity(n, n) - l_tot_) * q_ + p_;
    Eigen::PartialPivLU<Mat> lu(a);
    const double rc = lu.rcond();
    last_rcond_.store(rc, std::memory_order_relaxed);
    if (!(rc > 1e-14))
        throw std::runtime_error("ExactRelaxator: singular Q-restricted resolvent (rcond " + std::to_string(rc) + ")");
    return q_ * lu.solve(rhs);
}

Mat ExactRelaxator::liouvillian(Complex z, Method method) const {
    if (spectral_ok(method)) {
        Mat w = w_;
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
            const Complex den = z - q_eig_(i);
            if (std::abs(den) == 0.0) throw std::runtime_error("ExactRelaxator: z on the Q-spectrum");
            w.row(i) /= den;
        }
        return l_p_sys_ + u_ * w;
    }
    return l_p_sys_ + r_l_q_ * q_resolvent_apply(z, q_l_e_, method);
}

Mat ExactRelaxator::initial_correlation(const Mat& drho_corr, Complex z, Method method) const {
    if (drho_corr.rows() != ts_.dim() || drho_corr.cols() != ts_.dim())
        throw std::invalid_argument("initial_correlation: dimension mismatch");
    const Vec x = vectorize(drho_corr);
    if ((p_ * x).norm() > 1e-10 * std::max(1.0, x.norm()))
        throw std::invalid_argument("initial_correlation: input is not in the Q-subspace");
    if (spectral_ok(method)) {
        Vec y = vq_.adjoint() * x;
        for (Eigen::Index i = 0; i < y.size(); ++i) y(i) /= (z - q_eig_(i));
        return devectorize(u_ * y);
    }
    Mat rhs = x;
    return devectorize(r_l_q_ * q_resolvent_apply(z, rhs, method));
}

ExactRelaxator::Split ExactRelaxator::dissipator_split(double omega, double eps, Method method) const {
    if (!(eps > 0)) throw std::invalid_argument("dissipator_split: eps must be positive");
    const Mat lp = liouvillian(Complex(omega, eps), method);
    const Mat lm = liouvillian(Complex(omega, -eps), method);
    Split out;
    out.relaxator = 0.5 * I * (lp - lm);
    out.shift = 0.5 * (lp + lm) - l_p_sys_;
    return out;
}

double ExactRelaxator::default_eps(double omega_lo, double omega_hi) const {
    Eigen::SelfAdjointEigenSolver<Mat> es(ts_.h_tot(), Eigen::EigenvaluesOnly);
    const RVec& e = es.eigenvalues();
    std::vector<double> w;
    for (Eigen::Index a = 0; a < e.size(); ++a)
        for (Eigen::Index b = 0; b < e.size(); ++b) {
            const double x = e(a) - e(b);
            if (x >= omega_lo && x <= omega_hi) w.push_back(x);
        }
    std::sort(w.begin(), w.end());
    if (w.size() < 2) return 5.0 * std::max(omega_hi - omega_lo, 1e-3);
    return 5.0 * (w.back() - w.front()) / double(w.size() - 1);
}

std::vector<Mat> reduced_unitary_evolution(const TotalSystem& ts, const Mat& rho_tot0,
                                           const std::vector<double>& times) {
    Eigen::SelfAdjointEigenSolver<Mat> es(ts.h_tot());
    const Mat& u = es.eigenvectors();
    const RVec& e = es.eigenvalues();
    const Mat r0 = u.adjoint() * rho_tot0 * u;
    std::vector<Mat> out;
    out.reserve(times.size());
    for (double t : times) {
        Mat rt(r0.rows(), r0.cols());
        for (Eigen::Index a = 0; a < r0.rows(); ++a)
            for (Eigen::Index b = 0; b < r0.cols(); ++b) rt(a, b) = r0(a, b) * std::exp(-I * (e(a) - e(b)) * t);
        out.push_back(partial_trace_env(u * rt * u.adjoint(), ts.ds(), ts.de()));
    }
    return out;
}

Mat projected_total_resolvent(const TotalSystem& ts, Complex z) {
    Eigen::SelfAdjointEigenSolver<Mat> es(ts.h_tot());
    const Mat& u = es.eigenvectors();
    const RVec& e = es.eigenvalues();
    const int ds = ts.ds();
    Mat out(ds * ds, ds * ds);
    for (int i = 0; i < ds; ++i)
        for (int j = 0; j < ds; ++j) {
            Mat rho = Mat::Zero(ds, ds);
            rho(i, j) = 1.0;
            Mat x = u.adjoint() * kron(rho, ts.rho_env()) * u;
            for (Eigen::Index a = 0; a < x.rows(); ++a)
                for (Eigen::Index b = 0; b < x.cols(); ++b) x(a, b) /= (z - (e(a) - e(b)));
            out.col(i * ds + j) = vectorize(partial_trace_env(u * x * u.adjoint(), ds, ts.de()));
        }
    return out;
}

}  // namespace relax
