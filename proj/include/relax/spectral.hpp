// spectral.hpp: effective modes of L(w), residue and contour evolution, stationary states
#pragma once

#include "relax/weak.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace relax {

// L = sum_k lambda_k |R_k)(L_k| with (L_k|R_j) = delta_kj, (A|B) = Tr A^dagger B.
struct BiorthogonalDecomposition {
    Vec eigenvalues;
    std::vector<Mat> right, left;
    double condition = 1;  // of the right eigenvector matrix

    int size() const { return static_cast<int>(eigenvalues.size()); }
    Mat reconstruct() const;
};

// Throws std::runtime_error when the eigenvector matrix has condition number above max_condition.
BiorthogonalDecomposition biorth_eigendecompose(const Mat& l, double max_condition = 1e8);

struct EffectiveMode {
    Complex z;            // fixed point lambda_k(omega_k), z = omega - i delta
    Mat right, left;      // at omega_k
    Complex dlambda = 0;  // d lambda_k / d omega at omega_k
    Complex c = 1;        // 1 / (1 - dlambda)
    int start = -1;       // index of the L(0) eigenvalue the branch started from
    int iterations = 0;
    double overlap = 1;   // smallest normalized branch overlap along the iteration
    bool flagged = false; // branch identity uncertain (overlap < 0.5)

    double omega() const { return z.real(); }
    double delta() const { return -z.imag(); }
    double tau() const { return 1.0 / delta(); }
};

struct ModeOptions {
    double alpha = 0.5;       // damping of omega <- (1 - alpha) omega + alpha Re lambda
    double tol = 1e-10;       // on |Re lambda(omega) - omega|, relative to max(1, span)
    int max_iter = 200;
    double fd_rel = 1e-4;     // central-difference step relative to the L(0) spectral span
    double overlap_flag = 0.5;
};

struct EffectiveModeSet {
    std::vector<EffectiveMode> modes;
    double span = 1;          // max |lambda_k(0)|, at least 1
    int zero_modes = 0;
    std::vector<std::string> warnings;

    Vec frequencies() const;  // z_k
};

// Solves omega_k = Re lambda_k(omega_k) for every branch of L(0). Throws std::runtime_error on
// non-convergence.
EffectiveModeSet effective_modes(const FreqLiouvillian& fl, const ModeOptions& opt = {});

// B_k = c_k R_k (L_k|rho0)
std::vector<Mat> mode_amplitudes(const EffectiveModeSet& ms, const Mat& rho0);

// rho(t) = sum_k (1/2)(B_k e^{-i z_k t} + h.c.)
std::vector<Mat> evolve_residues(const EffectiveModeSet& ms, const Mat& rho0, const std::vector<double>& times);

struct LaplaceOptions {
    double eps = 0;        // contour height; 0 -> 1 / max(1, t_max)
    double step = 0;       // node spacing; 0 -> 2 pi eps / 18
    double width = 0;      // contour runs over |Re z| <= width; 0 -> automatic
    double kappa = 0;      // pole of the subtracted asymptotics at -i kappa; 0 -> max(1, ||L_P||)
    double tol = 1e-6;     // throw when the error estimate exceeds this
    bool parallel = true;
};

struct LaplaceResult {
    std::vector<Mat> rho;
    double error_estimate = 0;
    double eps = 0, step = 0, width = 0;
    int nodes = 0;
};

// rho(t) = (1/2 pi) int e^{-izt} i G(z) rho0(z) dz along Im z = eps, rho0(z) = rho0 + corr(z).
// The leading 1/z^n behaviour is subtracted and added back in closed form; the rest is summed
// with the trapezoid rule. corr may be empty.
LaplaceResult evolve_laplace_grid(const FreqLiouvillian& fl, const Mat& rho0,
                                  const std::function<Mat(Complex)>& corr, const std::vector<double>& times,
                                  const LaplaceOptions& opt = {});

struct StationaryResult {
    Mat rho;                     // trace-normalized Hermitian part; empty if degenerate
    std::vector<Mat> null_basis; // right null vectors of L(0)
    int multiplicity = 0;
    bool degenerate = false;
    double residual = 0;         // ||L(0) rho||
};

// Null space of L(0) with a singular-value threshold rel_threshold * ||L(0)||.
StationaryResult stationary_state(const FreqLiouvillian& fl, double rel_threshold = 1e-8);

// rho(z) = i [z - L(z)]^-1 rho0(z)
Mat resolvent_state(const FreqLiouvillian& fl, const Mat& rho0_z, Complex z);

// L = sum_k lambda_k |R_k)(L_k| from prescribed eigenvalues and right eigen-operators
std::shared_ptr<ConstantLiouvillian> liouvillian_from_spectrum(const std::vector<Complex>& eigenvalues,
                                                               const std::vector<Mat>& right, const Mat& l_p);

}  // namespace relax
