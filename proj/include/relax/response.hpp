// response.hpp: dynamic susceptibilities of open and isolated systems
#pragma once

#include "relax/spectral.hpp"
#include "relax/weak.hpp"

#include <string>
#include <vector>

namespace relax {

struct Susceptibility {
    std::vector<double> omega;
    std::vector<Complex> chi;
    std::vector<char> pole;  // resolvent singular at this point; chi is NaN there
    double broadening = 0;   // eps of the Kubo form, 0 for the open form
};

// chi_BA(w) = -Tr{(G(w)[A, rho_inf]) B}, G(w) = (w - L(w))^-1. The direction of rho_inf is
// regularized by adding i|rho_inf)(1|, which leaves the traceless solution unchanged.
Susceptibility chi_open(const FreqLiouvillian& fl, const Mat& rho_inf, const Mat& a, const Mat& b,
                        const std::vector<double>& omega, bool parallel = true);

// sum_mn (p_m - p_n) A_mn B_nm / (w + i eps - (E_m - E_n)) in the eigenbasis of H
Susceptibility chi_kubo(const Mat& h, const Mat& rho_eq, const Mat& a, const Mat& b, const std::vector<double>& omega,
                        double eps);

// L_H - i eps Pi with Pi X = X - Tr(X) rho_eq: the open generator whose chi_open is the Kubo form
std::shared_ptr<ConstantLiouvillian> kubo_regime_liouvillian(const Mat& h, const Mat& rho_eq, double eps);

// 1e-3 x smallest nonzero level spacing of H
double default_kubo_eps(const Mat& h);

struct KKReport {
    std::vector<double> re_from_im;  // -(1/pi) P int chi''(v)/(w - v) dv
    std::vector<double> im_from_re;
    double dev_re = 0;               // chi' vs reconstruction over the interior, relative to max |chi|
    double dev_im = 0;
    double max_deviation = 0;
    double edge_ratio = 0;           // |chi| at the edges over max |chi|
};

// Requires a uniform omega grid with an odd number of points.
KKReport kk_check(const Susceptibility& chi, double interior_fraction = 0.5);

struct DissipativePart {
    double omega = 0;
    double chi2 = 0;                 // sum over modes and m
    struct Mode {
        Complex lambda;
        std::vector<Complex> per_m;  // <AB>_{k;m}
        double chi2 = 0;
        double resonance = 0;        // sum_m Re <AB>_{k;m} / delta_k
    };
    std::vector<Mode> modes;
    int nearest = -1;                // mode whose Re lambda is closest to omega
};

// chi'' as the mode sum over the eigen-decomposition of L(w), with
// <AB>_{k;m} = p_m <m|[L_k^dagger, A]|m> Tr(R_k B) in the eigenbasis of rho_inf.
DissipativePart chi_dissipative(const FreqLiouvillian& fl, const Mat& rho_inf, const Mat& a, const Mat& b,
                                double omega);

struct ResonanceFit {
    double omega_ba = 0;
    double tau_ba = 0;
    Complex strength = 0;  // [BA]_0
    double residual = 0;   // rms |chi - fit| / rms |chi|
    bool accepted = false;
    std::string reason;
};

// chi = -[BA]_0 / (w - w_BA + i / tau_BA) fitted to the points with lo <= w <= hi
ResonanceFit lorentz_fit(const Susceptibility& chi, double lo, double hi, double max_residual = 1e-2);

}  // namespace relax
