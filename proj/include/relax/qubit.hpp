// qubit.hpp: closed-form spectral data of a qubit weakly coupled to a thermal bath
#pragma once

#include "relax/bath.hpp"
#include "relax/weak.hpp"

#include <memory>
#include <string>
#include <vector>

namespace relax {

struct QubitModel {
    double omega0 = 1;
    QubitCoupling s;
    std::shared_ptr<const BathCorrelation> bath;

    double temperature() const { return bath->temperature(); }
    Complex g(double w) const;
    double gamma(double w) const;
    // g(W) - conj g(-W)
    Complex h(double w) const;
};

// S_eg = 0: pure decoherence
struct DiagonalAnalytics {
    std::vector<double> fixed_points;  // all solutions of w = Re lambda_+(w) found near w0
    double omega_plus = 0;             // the one closest to w0
    double delta_plus = 0;             // -Im lambda_+(omega_plus)
    double tau_dec = 0;                // 1 / delta_plus
    double tau_dec_printed = 0;        // [gamma(w+ - w0)(S_e - S_g)(S_e - S_g e^{-(w+ - w0)/T})]^-1
    double tau_dec_zero = 0;           // [gamma(0)(S_e - S_g)^2]^-1, infinite when gamma(0) = 0
    bool no_decoherence = false;       // gamma(0) = 0
};

// lambda_+(w) = w0 + (S_e - S_g)(g(w - w0) S_e + conj g(w0 - w) S_g), the sigma_+ eigenvalue
Complex qubit_lambda_plus(const QubitModel& qm, double w);
Complex qubit_lambda_minus(const QubitModel& qm, double w);

DiagonalAnalytics diag_coupling_analytics(const QubitModel& qm);

// S_g = S_e = 0: populations and coherences decouple
struct OffDiagonalAnalytics {
    double rho_e_inf = 0;         // rho_e(0) from the zero-mode condition
    double rho_e_canonical = 0;   // e^{-w0/T} / (1 + e^{-w0/T})
    Complex lambda1_0 = 0;        // population eigenvalue at w = 0
    double tau_r_diag = 0;        // 1 / (-Im lambda1(0))
    double tau_r_diag_closed = 0; // [2 |S_eg|^2 gamma(w0)(1 + e^{-w0/T})]^-1
    std::vector<double> fixed_points;
    double omega2 = 0;
    Complex f = 0, dz0 = 0;       // at omega2
    double delta2 = 0;            // -Im f - Im dz0
    double tau_dec = 0;
    Mat r2, r3, l2, l3;           // coherence eigen-operators at omega2
};

// rho_e(w) of the zero mode
Complex qubit_rho_e(const QubitModel& qm, double w);
// population eigenvalue |S_eg|^2 (h(w + w0) + h(w - w0))
Complex qubit_lambda1(const QubitModel& qm, double w);
// f = |S_eg|^2 h(w); dz0 = sqrt(w0^2 + f^2) - w0
Complex qubit_f(const QubitModel& qm, double w);
Complex qubit_dz0(const QubitModel& qm, double w);

OffDiagonalAnalytics offdiag_coupling_analytics(const QubitModel& qm);

// Markov limit L(0)
struct MarkovQubit {
    double a_e = 0, a_eg = 0;
    Complex b_e = 0, b_eg = 0;
    double rate_down = 0, rate_up = 0;  // 2 gamma(+-w0) |S_eg|^2
    double tau_r = 0;                   // [2 gamma(w0)|S_eg|^2 (1 + e^{-w0/T})]^-1
    double tau_dec = 0;                 // [gamma(w0)(S_g - S_e)(S_g - S_e e^{-w0/T})]^-1, diagonal S only
};

MarkovQubit markov_qubit_rates(const QubitModel& qm);

// Closed-form Markov trajectory for diagonal or purely off-diagonal S.
Mat markov_qubit_state(const QubitModel& qm, const Mat& rho0, double t);

struct ComparisonRow {
    std::string quantity;
    double analytic, numeric, rel_dev;
};

// Closed forms against effective_modes / stationary_state on qubit_liouvillian.
std::vector<ComparisonRow> qubit_comparison(const QubitModel& qm);

}  // namespace relax
