#include "relax/liouville.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace relax {

namespace {

double scale_of(const Mat& m) { return std::max(1.0, m.norm()); }

}  // namespace

bool is_hermitian(const Mat& m, double rel_tol) {
    if (m.rows() != m.cols()) return false;
    return (m - m.adjoint()).norm() <= rel_tol * scale_of(m);
}

void require_square(const Mat& m, const std::string& what) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw std::invalid_argument(what + ": matrix must be square and non-empty");
}

void require_hermitian(const Mat& m, const std::string& what, double rel_tol) {
    require_square(m, what);
    if (!is_hermitian(m, rel_tol)) throw std::invalid_argument(what + ": matrix is not Hermitian");
}

OperatorMatrix::OperatorMatrix(Mat m, Kind kind, std::string label)
    : m_(std::move(m)), kind_(kind), label_(std::move(label)) {
    const std::string what = label_.empty() ? std::string("OperatorMatrix") : label_;
    require_square(m_, what);
    if (kind_ == Kind::general) return;
    require_hermitian(m_, what);
    if (kind_ == Kind::density) {
        if (std::abs(m_.trace() - Complex(1.0)) > 1e-12)
            throw std::invalid_argument(what + ": density operator must have unit trace");
        Eigen::SelfAdjointEigenSolver<Mat> es(m_, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-10)
            throw std::invalid_argument(what + ": density operator has a negative eigenvalue");
    }
}

OperatorMatrix OperatorMatrix::hermitian(Mat m, std::string label) {
    return OperatorMatrix(std::move(m), Kind::hermitian, std::move(label));
}

OperatorMatrix OperatorMatrix::density(Mat m, std::string label) {
    return OperatorMatrix(std::move(m), Kind::density, std::move(label));
}

Complex hs_inner(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("hs_inner: dimension mismatch");
    return (a.conjugate().cwiseProduct(b)).sum();
}

Vec vectorize(const Mat& x) {
    const Eigen::Index d = x.rows();
    Vec v(d * x.cols());
    for (Eigen::Index m = 0; m < d; ++m)
        for (Eigen::Index n = 0; n < x.cols(); ++n) v(m * x.cols() + n) = x(m, n);
    return v;
}

Mat devectorize(const Vec& v) {
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    if (d * d != v.size()) throw std::invalid_argument("devectorize: length is not a perfect square");
    Mat x(d, d);
    for (Eigen::Index m = 0; m < d; ++m)
        for (Eigen::Index n = 0; n < d; ++n) x(m, n) = v(m * d + n);
    return x;
}

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// row-major vec: vec(A X B) = (A (x) B^T) vec(X)
Mat left_mult(const Mat& a) {
    require_square(a, "left_mult");
    return kron(a, Mat::Identity(a.rows(), a.rows()));
}

Mat right_mult(const Mat& a) {
    require_square(a, "right_mult");
    return kron(Mat::Identity(a.rows(), a.rows()), a.transpose());
}

std::pair<Mat, Mat> left_right_mult_superops(const Mat& a) { return {left_mult(a), right_mult(a)}; }

Mat commutator_superop(const Mat& h) { return left_mult(h) - right_mult(h); }

Mat apply(const Mat& super, const Mat& x) {
    if (super.cols() != x.size()) throw std::invalid_argument("apply: dimension mismatch");
    return devectorize(super * vectorize(x));
}

Mat partial_trace_env(const Mat& x_tot, int ds, int de) {
    if (ds <= 0 || de <= 0 || x_tot.rows() != ds * de || x_tot.cols() != ds * de)
        throw std::invalid_argument("partial_trace_env: dimension factorization mismatch");
    Mat out = Mat::Zero(ds, ds);
    for (int i = 0; i < ds; ++i)
        for (int j = 0; j < ds; ++j)
            for (int a = 0; a < de; ++a) out(i, j) += x_tot(i * de + a, j * de + a);
    return out;
}

Mat partial_trace_sys(const Mat& x_tot, int ds, int de) {
    if (ds <= 0 || de <= 0 || x_tot.rows() != ds * de || x_tot.cols() != ds * de)
        throw std::invalid_argument("partial_trace_sys: dimension factorization mismatch");
    Mat out = Mat::Zero(de, de);
    for (int a = 0; a < de; ++a)
        for (int b = 0; b < de; ++b)
            for (int i = 0; i < ds; ++i) out(a, b) += x_tot(i * de + a, i * de + b);
    return out;
}

Mat BohrSpectrum::projector(int n) const { return vectors.col(n) * vectors.col(n).adjoint(); }

Mat BohrSpectrum::component(const Mat& x, int w) const {
    const Mat xe = to_eigenbasis(x);
    Mat ye = Mat::Zero(xe.rows(), xe.cols());
    for (auto [m, n] : component_index.at(w)) ye(m, n) = xe(m, n);
    return from_eigenbasis(ye);
}

Mat BohrSpectrum::component_superop(int w) const {
    const int d = dim();
    Mat out = Mat::Zero(d * d, d * d);
    for (auto [m, n] : component_index.at(w)) {
        // P_m (x) P_n^T
        const Mat pm = projector(m);
        const Mat pn = projector(n);
        out += kron(pm, pn.transpose());
    }
    return out;
}

int BohrSpectrum::index_of(double w, double tol) const {
    for (std::size_t i = 0; i < frequencies.size(); ++i)
        if (std::abs(frequencies[i] - w) <= tol) return static_cast<int>(i);
    return -1;
}

int BohrSpectrum::zero_index() const {
    for (std::size_t i = 0; i < frequencies.size(); ++i)
        if (frequencies[i] == 0.0) return static_cast<int>(i);
    return -1;
}

BohrSpectrum bohr_decompose(const Mat& h, double cluster_tol) {
    require_hermitian(h, "bohr_decompose");
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    BohrSpectrum bs;
    bs.energies = es.eigenvalues();
    bs.vectors = es.eigenvectors();
    const int d = bs.dim();
    const double span = bs.energies.maxCoeff() - bs.energies.minCoeff();
    const double tol = span > 0 ? cluster_tol * span : 1e-14;

    // cluster the non-negative differences, then mirror
    std::vector<double> diffs;
    for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n) diffs.push_back(std::abs(bs.energies(n) - bs.energies(m)));
    std::sort(diffs.begin(), diffs.end());
    std::vector<double> reps;
    std::vector<double> group;
    auto flush = [&] {
        if (group.empty()) return;
        double mean = 0;
        for (double g : group) mean += g;
        mean /= static_cast<double>(group.size());
        reps.push_back(group.front() <= tol ? 0.0 : mean);
        group.clear();
    };
    for (double x : diffs) {
        if (!group.empty() && x - group.back() > tol) flush();
        group.push_back(x);
    }
    flush();

    for (auto it = reps.rbegin(); it != reps.rend(); ++it)
        if (*it != 0.0) bs.frequencies.push_back(-*it);
    for (double r : reps) bs.frequencies.push_back(r);
    bs.component_index.resize(bs.frequencies.size());

    for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n) {
            const double w = bs.energies(n) - bs.energies(m);
            std::size_t best = 0;
            double best_err = std::abs(bs.frequencies[0] - w);
            for (std::size_t i = 1; i < bs.frequencies.size(); ++i) {
                const double e = std::abs(bs.frequencies[i] - w);
                if (e < best_err) best_err = e, best = i;
            }
            bs.component_index[best].emplace_back(m, n);
        }
    return bs;
}

}  // namespace relax
