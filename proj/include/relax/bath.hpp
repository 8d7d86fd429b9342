// bath.hpp: environmental correlation functions gamma_kk'(W) and their principal-value partners
#pragma once

#include "relax/exact.hpp"
#include "relax/liouville.hpp"

#include <functional>
#include <limits>
#include <vector>

namespace relax {

// Uniform grid symmetric about 0: nodes (i - c) h, c = (n - 1)/2, n odd so that 0 is a node.
class FreqGrid {
public:
    FreqGrid() = default;
    FreqGrid(double omega_max, int n);

    // omega_max >= 8 max(max Bohr frequency, 5T), step rounded up to 1, 2 or 5 x 10^k; n = 4097
    static FreqGrid for_system(double max_bohr, double temperature, int n = 4097);

    double omega_max() const { return omega_max_; }
    int size() const { return n_; }
    double step() const { return h_; }
    const RVec& nodes() const { return x_; }
    double node(int i) const { return x_(i); }
    bool contains(double w) const { return w >= x_(0) && w <= x_(n_ - 1); }

private:
    double omega_max_ = 0;
    int n_ = 0;
    double h_ = 0;
    RVec x_;
};

// general: no symmetry enforced (broadened finite environments with non-uniform rho_env)
enum class BathMode { thermal, uniform, general };

inline constexpr double infinite_temperature = std::numeric_limits<double>::infinity();

// gamma_kk'(W) on a grid, K x K per node, with s_kk'(W) = (1/pi) P int gamma(T)/(W - T) dT.
// Thermal mode enforces gamma_k'k(-W) = e^{-W/T} gamma_kk'(W); uniform mode enforces
// gamma_kk'(W) = gamma_k'k(-W). Immutable after construction.
class BathCorrelation {
public:
    BathCorrelation(FreqGrid grid, std::vector<Mat> gamma, BathMode mode, double temperature);

    int channels() const { return k_; }
    const FreqGrid& grid() const { return grid_; }
    BathMode mode() const { return mode_; }
    double temperature() const { return t_; }

    const std::vector<Mat>& gamma_nodes() const { return gamma_; }
    const std::vector<Mat>& s_nodes() const { return s_; }

    // Linear interpolation; std::out_of_range outside the grid.
    Mat gamma(double w) const;
    Mat s(double w) const;
    // g = s - i gamma on the real axis
    Mat g(double w) const;
    // (1/pi) int gamma(T)/(z - T) dT, analytic off the real axis
    Mat g(Complex z) const;
    Complex g(Complex z, int k, int kp) const;

    bool covers(double w) const { return grid_.contains(w); }
    // max |gamma| on the two edge nodes over max |gamma| on the grid
    double edge_ratio() const { return edge_ratio_; }
    // largest relative deviation from the mode's symmetry (KMS or evenness)
    double symmetry_violation() const;

    // C_kk'(t) = (1/pi) int gamma_kk'(W) e^{-iWt} dW = <dB_k(t) dB_k'>
    Complex correlation(double t, int k = 0, int kp = 0) const;
    // int_0^tmax |C(t)| dt / |C(0)|
    double correlation_time(double t_max, int nt = 4001, int k = 0) const;

    // recompute s from gamma with the serial or parallel kernel
    void fill_s(bool parallel = true);

private:
    Vec channel(const std::vector<Mat>& v, int k, int kp) const;

    FreqGrid grid_;
    std::vector<Mat> gamma_, s_;
    BathMode mode_;
    double t_;
    int k_ = 1;
    double edge_ratio_ = 0;
    std::vector<std::vector<Vec>> gamma_chan_;
};

// Bose occupation 1/(e^{W/T} - 1)
double bose(double w, double temperature);

// gamma(W) = pi nu(|W|) |kappa(|W|)|^2 (1 + N(W)) for W > 0 and N(|W|) for W < 0, nu = W^p.
// W = 0 takes the limit: pi kappa(0)^2 T for p = 1, zero for p > 1.
BathCorrelation gamma_bosonic(double p, const std::function<double(double)>& kappa, double temperature,
                              const FreqGrid& grid);

// Scalar gamma supplied on W >= 0 by a function; negative side by KMS (thermal) or evenness (uniform).
BathCorrelation gamma_phenomenological(const std::function<double(double)>& gamma_pos, BathMode mode,
                                       double temperature, const FreqGrid& grid);

// Same, from a table of (W, gamma) rows with W >= 0, linearly interpolated, zero outside.
BathCorrelation gamma_from_table(const std::vector<std::pair<double, double>>& samples, BathMode mode,
                                 double temperature, const FreqGrid& grid);

// Recompute s from gamma; the result is identical to the constructor's fill.
BathCorrelation s_from_gamma(const BathCorrelation& bc);

// gamma_kk'(W) = sum_ab (dB_k)_ba (dB_k' rho_env)_ab eps / ((W - (E_a - E_b))^2 + eps^2) in the
// H_env eigenbasis. Uniform mode for uniform rho_env (evenness survives broadening), general otherwise.
BathCorrelation gamma_from_env_exact(const TotalSystem& ts, double eps, const FreqGrid& grid);

// Correlation table g0_kl(W) for initial correlations, complex K x L per node.
struct CorrelationTable {
    FreqGrid grid;
    std::vector<Mat> values;
    Mat at(double w) const;
};

// g0_kl(W) = sum_ab (dB_k)_ba (drho_e^(l))_ab / (W + i eps - (E_a - E_b))
CorrelationTable g0_from_env_exact(const TotalSystem& ts, const std::vector<Mat>& drho_env, double eps,
                                   const FreqGrid& grid);

}  // namespace relax
