// weak.hpp: frequency-dependent relaxator Liouville L(w) = L_P + dH(w) - i Gamma(w)
#pragma once

#include "relax/bath.hpp"
#include "relax/exact.hpp"
#include "relax/liouville.hpp"

#include <limits>
#include <map>
#include <memory>
#include <shared_mutex>
#include <vector>

namespace relax {

// Evaluator w -> L(w) on the system Liouville space, with its analytic continuation L(z).
class FreqLiouvillian {
public:
    virtual ~FreqLiouvillian() = default;

    virtual int dim() const = 0;
    virtual Mat at(double w) const = 0;
    virtual Mat at(Complex z) const = 0;
    virtual Mat shift(double w) const = 0;
    virtual Mat relaxator(double w) const = 0;
    virtual const Mat& l_p() const = 0;
    virtual bool frequency_independent() const { return false; }
    // at(w) is defined for |w| <= max_frequency()
    virtual double max_frequency() const { return std::numeric_limits<double>::infinity(); }
};

// w-independent generator; shift and relaxator are its HS-Hermitian and anti-Hermitian parts minus L_P.
class ConstantLiouvillian final : public FreqLiouvillian {
public:
    ConstantLiouvillian(Mat l, Mat l_p);
    explicit ConstantLiouvillian(Mat l);

    int dim() const override { return d_; }
    Mat at(double) const override { return l_; }
    Mat at(Complex) const override { return l_; }
    Mat shift(double) const override;
    Mat relaxator(double) const override;
    const Mat& l_p() const override { return l_p_; }
    bool frequency_independent() const override { return true; }

private:
    Mat l_, l_p_;
    int d_;
};

class WeakCouplingModel {
public:
    // mean_b: <B_k>_env, absorbed into H_P; the bath describes dB_k = B_k - <B_k>.
    WeakCouplingModel(Mat h, std::vector<Mat> couplings, std::shared_ptr<const BathCorrelation> bath,
                      std::vector<Complex> mean_b = {});

    int dim() const { return static_cast<int>(h_.rows()); }
    const Mat& h() const { return h_; }
    const Mat& h_p() const { return h_p_; }
    const Mat& l_p() const { return l_p_; }
    const std::vector<Mat>& couplings() const { return s_; }
    const BathCorrelation& bath() const { return *bath_; }
    const BohrSpectrum& bohr() const { return bohr_; }

    // largest |w| with w + w~ inside the bath grid for every Bohr frequency w~
    double max_frequency() const;

    // sum g(z + w~) T1 - conj(g(-conj z - w~)) T2; on the real axis g = s - i gamma
    Mat dissipator(Complex z) const;
    Mat dissipator(double w) const;
    Mat shift(double w) const;
    Mat relaxator(double w) const;

    // T1 = [S_k, (S_k' .)(w~)], T2 = -[S_k, (. S_k')(w~)] as superoperators
    struct Term {
        double omega_tilde;
        int k, kp;
        Mat t1, t2;
    };
    const std::vector<Term>& terms() const { return terms_; }

private:
    void check_range(double w) const;

    Mat h_, h_p_, l_p_;
    std::vector<Mat> s_;
    std::shared_ptr<const BathCorrelation> bath_;
    BohrSpectrum bohr_;
    std::vector<Term> terms_;
};

Mat relaxator_weak(const WeakCouplingModel& model, double w);
Mat shift_weak(const WeakCouplingModel& model, double w);

// Real-axis evaluations are cached per w; the cache is append-only and safe under concurrent reads.
class WeakLiouvillian final : public FreqLiouvillian {
public:
    explicit WeakLiouvillian(std::shared_ptr<const WeakCouplingModel> model);

    int dim() const override { return model_->dim(); }
    Mat at(double w) const override;
    Mat at(Complex z) const override;
    Mat shift(double w) const override { return model_->shift(w); }
    Mat relaxator(double w) const override { return model_->relaxator(w); }
    const Mat& l_p() const override { return model_->l_p(); }
    double max_frequency() const override { return model_->max_frequency(); }

    const WeakCouplingModel& model() const { return *model_; }
    std::size_t cache_size() const;

private:
    std::shared_ptr<const WeakCouplingModel> model_;
    mutable std::shared_mutex mu_;
    mutable std::map<double, Mat> cache_;
};

std::shared_ptr<WeakLiouvillian> liouvillian_weak(std::shared_ptr<const WeakCouplingModel> model);

// Exact L(w + i eps) from a finite total system.
class ExactFreqLiouvillian final : public FreqLiouvillian {
public:
    ExactFreqLiouvillian(std::shared_ptr<const ExactRelaxator> rel, double eps);

    int dim() const override { return rel_->ds(); }
    Mat at(double w) const override { return rel_->liouvillian(Complex(w, eps_)); }
    Mat at(Complex z) const override;
    Mat shift(double w) const override { return rel_->dissipator_split(w, eps_).shift; }
    Mat relaxator(double w) const override { return rel_->dissipator_split(w, eps_).relaxator; }
    const Mat& l_p() const override { return rel_->l_p(); }
    double eps() const { return eps_; }

private:
    std::shared_ptr<const ExactRelaxator> rel_;
    double eps_;
};

// Qubit H = (w0/2) sigma_3 in the basis (|g>, |e>), S = S_g P_g + S_e P_e + S_eg sigma_+ + h.c.
// general: g(W) and conj g(-W) kept separate (identical to liouvillian_weak);
// printed: conj g(-W) replaced by -e^{-W/T} g(W) as in the KMS-substituted closed form.
enum class QubitForm { general, printed };

struct QubitCoupling {
    double s_g = 0, s_e = 0;
    Complex s_eg = 0;
    Mat matrix() const;
};

class QubitLiouvillian final : public FreqLiouvillian {
public:
    QubitLiouvillian(double omega0, QubitCoupling s, std::shared_ptr<const BathCorrelation> bath,
                     QubitForm form = QubitForm::general);

    int dim() const override { return 2; }
    Mat at(double w) const override;
    Mat at(Complex z) const override;
    Mat shift(double w) const override;
    Mat relaxator(double w) const override;
    const Mat& l_p() const override { return l_p_; }
    double max_frequency() const override { return bath_->grid().omega_max() - omega0_; }

    // L(w) applied to one operator, straight from the closed form
    Mat apply(double w, const Mat& rho) const;

private:
    enum class Part { full, shift, relax };
    Mat assemble(Complex z, Part part) const;
    std::vector<Mat> apply_z(Complex z, const std::vector<Mat>& rhos, Part part) const;

    double omega0_;
    QubitCoupling s_;
    std::shared_ptr<const BathCorrelation> bath_;
    QubitForm form_;
    Mat l_p_;
};

std::shared_ptr<QubitLiouvillian> qubit_liouvillian(double omega0, QubitCoupling s,
                                                    std::shared_ptr<const BathCorrelation> bath,
                                                    QubitForm form = QubitForm::general);

inline Mat qubit_hamiltonian(double omega0) {
    Mat h = Mat::Zero(2, 2);
    h(0, 0) = -0.5 * omega0;
    h(1, 1) = 0.5 * omega0;
    return h;
}

// sum_w~ sum_kl g0_kl(w + w~) [S_k, drho_s^(l)(w~)]
Mat initial_corr_weak(const WeakCouplingModel& model, const std::vector<Mat>& drho_s, const CorrelationTable& g0,
                      double w);

}  // namespace relax
