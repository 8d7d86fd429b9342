// liouville.hpp: operator/superoperator algebra on a d-level system
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <utility>
#include <vector>

namespace relax {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr Complex I{0.0, 1.0};

// Validated system operator. Hermitian/density flags are checked once at
// construction; afterwards the value is immutable.
class OperatorMatrix {
public:
    enum class Kind { general, hermitian, density };

    OperatorMatrix() = default;
    OperatorMatrix(Mat m, Kind kind = Kind::general, std::string label = {});

    static OperatorMatrix hermitian(Mat m, std::string label = {});
    static OperatorMatrix density(Mat m, std::string label = {});

    const Mat& matrix() const { return m_; }
    int dim() const { return static_cast<int>(m_.rows()); }
    Kind kind() const { return kind_; }
    const std::string& label() const { return label_; }

private:
    Mat m_;
    Kind kind_ = Kind::general;
    std::string label_;
};

// Throws std::invalid_argument if M is not Hermitian within rel_tol.
void require_hermitian(const Mat& m, const std::string& what, double rel_tol = 1e-12);
void require_square(const Mat& m, const std::string& what);
bool is_hermitian(const Mat& m, double rel_tol = 1e-12);

Complex hs_inner(const Mat& a, const Mat& b);

// |m><n| <-> flat index m*d + n
Vec vectorize(const Mat& x);
Mat devectorize(const Vec& v);

Mat kron(const Mat& a, const Mat& b);

Mat left_mult(const Mat& a);
Mat right_mult(const Mat& a);
std::pair<Mat, Mat> left_right_mult_superops(const Mat& a);
Mat commutator_superop(const Mat& h);
Mat apply(const Mat& super, const Mat& x);

Mat partial_trace_env(const Mat& x_tot, int ds, int de);
Mat partial_trace_sys(const Mat& x_tot, int ds, int de);

struct BohrSpectrum {
    RVec energies;                 // ascending
    Mat vectors;                   // columns are eigenvectors of H
    std::vector<double> frequencies;  // sorted, symmetric about 0
    // component_index[w] lists (m, n) with eps_n - eps_m == frequencies[w]
    std::vector<std::vector<std::pair<int, int>>> component_index;

    int dim() const { return static_cast<int>(energies.size()); }
    Mat projector(int n) const;
    // X(w~) = sum_{eps_n - eps_m = w~} P_m X P_n
    Mat component(const Mat& x, int w) const;
    Mat component_superop(int w) const;
    int index_of(double w, double tol) const;  // -1 if absent
    int zero_index() const;
    // Matrix elements in the energy basis
    Mat to_eigenbasis(const Mat& x) const { return vectors.adjoint() * x * vectors; }
    Mat from_eigenbasis(const Mat& x) const { return vectors * x * vectors.adjoint(); }
};

BohrSpectrum bohr_decompose(const Mat& h, double cluster_tol = 1e-9);

}  // namespace relax
