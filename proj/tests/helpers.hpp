// helpers.hpp: random operators and small oracles shared by the test binaries
#pragma once

#include "relax/bath.hpp"
#include "relax/exact.hpp"
#include "relax/liouville.hpp"

#include <cmath>
#include <memory>
#include <random>

namespace testing_util {

using relax::Complex;
using relax::Mat;

inline Mat random_matrix(std::mt19937_64& rng, int rows, int cols) {
    std::normal_distribution<double> n(0.0, 1.0);
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = Complex(n(rng), n(rng));
    return m;
}

inline Mat random_hermitian(std::mt19937_64& rng, int d, double scale = 1.0) {
    const Mat a = random_matrix(rng, d, d);
    return scale * 0.5 * (a + a.adjoint());
}

inline Mat random_density(std::mt19937_64& rng, int d) {
    const Mat a = random_matrix(rng, d, d);
    Mat r = a * a.adjoint();
    return r / r.trace();
}

inline double fro(const Mat& m) { return m.norm(); }

inline Mat sigma_x() {
    Mat s = Mat::Zero(2, 2);
    s(0, 1) = s(1, 0) = 1;
    return s;
}

inline Mat sigma_plus() {  // |e><g| with index 0 = g, 1 = e
    Mat s = Mat::Zero(2, 2);
    s(1, 0) = 1;
    return s;
}

inline Mat thermal_state(const Mat& h, double t) {
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    const auto& e = es.eigenvalues();
    Eigen::VectorXd w(e.size());
    for (int i = 0; i < e.size(); ++i) w(i) = std::exp(-(e(i) - e(0)) / t);
    w /= w.sum();
    return es.eigenvectors() * w.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

// gamma(W >= 0) used by the qubit tests: gamma(0) = 0.05, gamma(1) = 0.1
inline double qubit_gamma(double w) {
    const double w2 = w * w;
    return (0.05 + 0.05 * w2 * std::exp((1 - w2) / 4)) * std::exp(-w2 * (w2 - 1) / 625);
}

inline std::shared_ptr<const relax::BathCorrelation> qubit_bath(double temperature = 1.0, double omega0 = 1.0) {
    const auto grid = relax::FreqGrid::for_system(omega0, temperature);
    return std::make_shared<const relax::BathCorrelation>(
        relax::gamma_phenomenological(qubit_gamma, relax::BathMode::thermal, temperature, grid));
}

inline relax::TotalSystem random_total(std::mt19937_64& rng, int ds, int de, double scale = 0.3,
                                       int n_couplings = 1) {
    std::vector<relax::Coupling> c;
    for (int k = 0; k < n_couplings; ++k)
        c.push_back({random_hermitian(rng, ds), random_hermitian(rng, de, scale)});
    return relax::TotalSystem(random_hermitian(rng, ds), random_hermitian(rng, de), c);
}

}  // namespace testing_util
