// exact.hpp: projector algebra for a small finite system+environment
#pragma once

#include "relax/liouville.hpp"

#include <atomic>
#include <optional>
#include <vector>

namespace relax {

struct Coupling {
    Mat s;  // system operator S_k
    Mat b;  // environment operator B_k
};

// H_tot = H (x) 1 + 1 (x) H_env + sum_k S_k (x) B_k, system index major.
class TotalSystem {
public:
    // rho_env empty -> uniform 1/d_e
    TotalSystem(Mat h, Mat h_env, std::vector<Coupling> couplings, std::optional<Mat> rho_env = std::nullopt);

    int ds() const { return static_cast<int>(h_.rows()); }
    int de() const { return static_cast<int>(h_env_.rows()); }
    int dim() const { return ds() * de(); }
    bool uniform() const { return uniform_; }

    const Mat& h() const { return h_; }
    const Mat& h_env() const { return h_env_; }
    const std::vector<Coupling>& couplings() const { return couplings_; }
    const Mat& rho_env() const { return rho_env_; }

    Mat h_tot() const;
    // <B_k>_env
    Complex mean_b(int k) const;

private:
    Mat h_, h_env_;
    std::vector<Coupling> couplings_;
    Mat rho_env_;
    bool uniform_ = true;
};

// Superoperators on the total Liouville space (dimension D^2, D = d_s d_e).
struct ProjectorPair {
    Mat p, q;
    Mat l_tot, l_p, l_pq, l_qp, l_q;
};

ProjectorPair build_projector(const TotalSystem& ts);

// vec(rho) -> vec(rho (x) rho_env), shape D^2 x d_s^2
Mat embed_superop(const TotalSystem& ts);
// vec(X_tot) -> vec(Tr_env X_tot), shape d_s^2 x D^2
Mat reduce_superop(const TotalSystem& ts);

// Blocks built from the Hamiltonian formulas rather than by sandwiching L_tot.
struct HamiltonianBlocks {
    Mat h_p;     // H + sum_k <B_k> S_k
    Mat l_p;     // [H_P, .] on the system Liouville space
    Mat l_qp;    // D^2 x d_s^2: rho -> Q L_tot (rho (x) rho_env)
    Mat l_pq;    // d_s^2 x D^2: X -> Tr_env L_tot Q X
    Mat l_q;     // D^2 x D^2: Q L_tot Q
};

HamiltonianBlocks hamiltonian_blocks(const TotalSystem& ts);

// Relaxator Liouville L(z) = L_P + L_PQ G_Q(z) L_QP on the system space.
// Uniform rho_env: QLQ is Hermitian and G_Q(z) is evaluated from one
// eigendecomposition. Otherwise each z solves Q[Q(z - L)Q + P]^-1 Q directly.
class ExactRelaxator {
public:
    enum class Method { automatic, spectral, direct };

    explicit ExactRelaxator(const TotalSystem& ts);

    const TotalSystem& system() const { return ts_; }
    const Mat& l_p() const { return l_p_sys_; }
    int ds() const { return ts_.ds(); }

    Mat liouvillian(Complex z, Method method = Method::automatic) const;
    // L_PQ G_Q(z) applied to a Q-space total operator, reduced to the system
    Mat initial_correlation(const Mat& drho_corr, Complex z, Method method = Method::automatic) const;

    struct Split {
        Mat shift;       // Delta H(omega)
        Mat relaxator;   // Gamma(omega)
    };
    Split dissipator_split(double omega, double eps, Method method = Method::automatic) const;

    // Eigenvalues of L_Q restricted to the Q-subspace (uniform mode only).
    const RVec& q_spectrum() const { return q_eig_; }
    // Reciprocal condition number of the last direct solve.
    double last_rcond() const { return last_rcond_.load(std::memory_order_relaxed); }
    // Default broadening: 5 x mean Q-eigenvalue spacing in the probed window.
    double default_eps(double omega_lo, double omega_hi) const;

private:
    bool spectral_ok(Method m) const;
    Mat q_resolvent_apply(Complex z, const Mat& rhs, Method method) const;

    TotalSystem ts_;
    Mat embed_, reduce_, p_, q_, l_tot_;
    Mat l_p_sys_;
    Mat q_l_e_;       // Q L E, D^2 x d_s^2
    Mat r_l_q_;       // R L Q, d_s^2 x D^2
    // spectral data (uniform mode)
    RVec q_eig_;
    Mat u_;           // R L Q V_Q
    Mat w_;           // V_Q^dagger Q L E
    Mat vq_;          // Q-space eigenvectors
    mutable std::atomic<double> last_rcond_{1.0};
};

// Exact reduced dynamics by full unitary propagation: Tr_env e^{-iH t} rho e^{iH t}
std::vector<Mat> reduced_unitary_evolution(const TotalSystem& ts, const Mat& rho_tot0,
                                           const std::vector<double>& times);

// P G_tot(z) P on the system space through the eigenbasis of H_tot.
Mat projected_total_resolvent(const TotalSystem& ts, Complex z);

}  // namespace relax
