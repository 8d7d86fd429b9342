// checks.hpp: structural invariants of relaxator Liouvilles
#pragma once

#include "relax/weak.hpp"

namespace relax {

// The adjoint map J X = X^dagger written on vec space: J v = swap * conj(v).
Mat adjoint_swap(int d);

// max over basis inputs of |Tr L X|, i.e. the largest entry of (1| L
double trace_conservation_error(const Mat& l);

// || J A J - sign B || / max(1, ||A||): sign -1 for L and the shift, +1 for the relaxator
double pairing_error(const Mat& a, const Mat& b, double sign);

// smallest eigenvalue of the HS-Hermitian part, and the anti-Hermitian defect, relative to ||G||
struct PositivityReport {
    double min_eigenvalue = 0;
    double hermiticity_defect = 0;
};
PositivityReport relaxator_positivity(const Mat& gamma);

// q_ij = Re (B_i|A B_j) symmetrized over an orthonormal Hermitian basis B, i.e. the form rho -> Tr(rho A rho)
RMat hermitian_quadratic_form(const Mat& super);

struct InvariantReport {
    double trace = 0;       // |Tr L(w) rho| over the probed w
    double pairing_l = 0;   // (L(w) rho)^dagger = -L(-w) rho
    double pairing_h = 0;   // shift
    double pairing_g = 0;   // relaxator
    double min_gamma = 0;   // min eigenvalue of Gamma(w), relative
    double evenness = 0;    // Tr(rho Gamma(w) rho) - Tr(rho Gamma(-w) rho) over Hermitian rho, relative
};

// Probes L(w) at the given frequencies.
InvariantReport liouvillian_invariants(const FreqLiouvillian& fl, const std::vector<double>& omegas);

}  // namespace relax
