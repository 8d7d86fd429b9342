#include "relax/checks.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <vector>

namespace relax {

Mat adjoint_swap(int d) {
    Mat p = Mat::Zero(d * d, d * d);
    for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n) p(n * d + m, m * d + n) = 1;
    return p;
}

double trace_conservation_error(const Mat& l) {
    const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(l.rows()))));
    Vec one = Vec::Zero(l.rows());
    for (int m = 0; m < d; ++m) one(m * d + m) = 1;
    return (one.transpose() * l).cwiseAbs().maxCoeff();
}

double pairing_error(const Mat& a, const Mat& b, double sign) {
    const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(a.rows()))));
    const Mat p = adjoint_swap(d);
    return (p * a.conjugate() * p - sign * b).norm() / std::max(1.0, a.norm());
}

PositivityReport relaxator_positivity(const Mat& gamma) {
    PositivityReport r;
    const double scale = std::max(1.0, gamma.norm());
    const Mat herm = 0.5 * (gamma + gamma.adjoint());
    r.hermiticity_defect = (gamma - herm).norm() / scale;
    Eigen::SelfAdjointEigenSolver<Mat> es(herm, Eigen::EigenvaluesOnly);
    r.min_eigenvalue = es.eigenvalues().minCoeff() / scale;
    return r;
}

RMat hermitian_quadratic_form(const Mat& super) {
    const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(super.rows()))));
    // orthonormal Hermitian basis: diagonal dyads, then (|m><n| + |n><m|)/sqrt2 and i(|m><n| - |n><m|)/sqrt2
    std::vector<Vec> basis;
    const double r = 1.0 / std::sqrt(2.0);
    for (int m = 0; m < d; ++m) {
        Vec v = Vec::Zero(d * d);
        v(m * d + m) = 1;
        basis.push_back(v);
    }
    for (int m = 0; m < d; ++m)
        for (int n = m + 1; n < d; ++n) {
            Vec a = Vec::Zero(d * d), b = Vec::Zero(d * d);
            a(m * d + n) = a(n * d + m) = r;
            b(m * d + n) = Complex(0, r);
            b(n * d + m) = Complex(0, -r);
            basis.push_back(a);
            basis.push_back(b);
        }
    const int n = d * d;
    RMat q(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) q(i, j) = basis[i].dot(super * basis[j]).real();
    return 0.5 * (q + q.transpose());
}

InvariantReport liouvillian_invariants(const FreqLiouvillian& fl, const std::vector<double>& omegas) {
    InvariantReport r;
    for (double w : omegas) {
        const Mat l = fl.at(w), lm = fl.at(-w);
        r.trace = std::max(r.trace, trace_conservation_error(l));
        r.pairing_l = std::max(r.pairing_l, pairing_error(l, lm, -1));
        const Mat h = fl.shift(w), hm = fl.shift(-w);
        r.pairing_h = std::max(r.pairing_h, pairing_error(h, hm, -1));
        const Mat g = fl.relaxator(w), gm = fl.relaxator(-w);
        r.pairing_g = std::max(r.pairing_g, pairing_error(g, gm, 1));
        r.min_gamma = std::min(r.min_gamma, relaxator_positivity(g).min_eigenvalue);
        r.evenness = std::max(r.evenness, (hermitian_quadratic_form(g) - hermitian_quadratic_form(gm)).norm() /
                                              std::max(1.0, g.norm()));
    }
    return r;
}

}  // namespace relax
