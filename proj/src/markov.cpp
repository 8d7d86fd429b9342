#include "relax/markov.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>

namespace relax {

std::shared_ptr<ConstantLiouvillian> markov_limit(const FreqLiouvillian& fl) {
    return std::make_shared<ConstantLiouvillian>(fl.at(0.0), fl.l_p());
}

SecularParts secular_parts(const WeakCouplingModel& model) {
    const int d = model.dim();
    const BohrSpectrum& bs = model.bohr();
    const auto& s = model.couplings();
    const int kk = static_cast<int>(s.size());
    SecularParts out;
    out.h_ls = Mat::Zero(d, d);
    out.relaxator = Mat::Zero(d * d, d * d);
    for (int w = 0; w < static_cast<int>(bs.frequencies.size()); ++w) {
        const double wt = bs.frequencies[w];
        const Mat gam = model.bath().gamma(wt);
        const Mat sh = model.bath().s(wt);
        std::vector<Mat> comp(kk);
        for (int k = 0; k < kk; ++k) comp[k] = bs.component(s[k], w);
        for (int k = 0; k < kk; ++k)
            for (int kp = 0; kp < kk; ++kp) {
                const Mat a = comp[k].adjoint() * comp[kp];
                out.h_ls += sh(k, kp) * a;
                out.relaxator += gam(k, kp) * (left_mult(a) + right_mult(a) -
                                               2.0 * left_mult(comp[kp]) * right_mult(comp[k].adjoint()));
            }
    }
    out.h_ls = (0.5 * (out.h_ls + out.h_ls.adjoint())).eval();
    out.l = commutator_superop(model.h_p() + out.h_ls) - I * out.relaxator;
    return out;
}

std::shared_ptr<ConstantLiouvillian> secular_liouvillian(const WeakCouplingModel& model) {
    return std::make_shared<ConstantLiouvillian>(secular_parts(model).l, model.l_p());
}

Mat propagator(const Mat& l, double t) { return Mat(-I * t * l).exp(); }

Mat choi_matrix(const Mat& map) {
    const auto d = static_cast<int>(std::llround(std::sqrt(double(map.rows()))));
    if (d * d != map.rows() || map.rows() != map.cols()) throw std::invalid_argument("choi_matrix: not a d^2 x d^2 map");
    Mat c(d * d, d * d);
    for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n)
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b) c(m * d + a, n * d + b) = map(a * d + b, m * d + n);
    return c;
}

double min_choi_eigenvalue(const Mat& map) {
    const Mat c = choi_matrix(map);
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (c + c.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace relax
