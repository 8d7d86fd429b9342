#include "relax/weak.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

namespace relax {

ConstantLiouvillian::ConstantLiouvillian(Mat l, Mat l_p) : l_(std::move(l)), l_p_(std::move(l_p)) {
    require_square(l_, "ConstantLiouvillian");
    const auto d = static_cast<int>(std::llround(std::sqrt(double(l_.rows()))));
    if (d * d != l_.rows()) throw std::invalid_argument("ConstantLiouvillian: size is not d^2");
    if (l_p_.rows() != l_.rows() || l_p_.cols() != l_.cols())
        throw std::invalid_argument("ConstantLiouvillian: L_P size mismatch");
    d_ = d;
}

ConstantLiouvillian::ConstantLiouvillian(Mat l) : ConstantLiouvillian(l, Mat::Zero(l.rows(), l.cols())) {}

Mat ConstantLiouvillian::shift(double) const { return 0.5 * (l_ + l_.adjoint()) - l_p_; }

Mat ConstantLiouvillian::relaxator(double) const { return 0.5 * I * (l_ - l_.adjoint()); }

WeakCouplingModel::WeakCouplingModel(Mat h, std::vector<Mat> couplings, std::shared_ptr<const BathCorrelation> bath,
                                     std::vector<Complex> mean_b)
    : h_(std::move(h)), s_(std::move(couplings)), bath_(std::move(bath)) {
    require_hermitian(h_, "WeakCouplingModel: H");
    if (!bath_) throw std::invalid_argument("WeakCouplingModel: bath required");
    if (static_cast<int>(s_.size()) != bath_->channels())
        throw std::invalid_argument("WeakCouplingModel: bath has " + std::to_string(bath_->channels()) +
                                    " channels but " + std::to_string(s_.size()) + " couplings were given");
    if (!mean_b.empty() && mean_b.size() != s_.size())
        throw std::invalid_argument("WeakCouplingModel: mean_b length mismatch");
    h_p_ = h_;
    for (std::size_t k = 0; k < s_.size(); ++k) {
        const std::string tag = "couplings[" + std::to_string(k) + "]";
        require_hermitian(s_[k], tag);
        if (s_[k].rows() != h_.rows()) throw std::invalid_argument(tag + ": dimension mismatch with H");
        if (!mean_b.empty()) h_p_ += mean_b[k] * s_[k];
    }
    l_p_ = commutator_superop(h_p_);
    bohr_ = bohr_decompose(h_p_);
    for (int w = 0; w < static_cast<int>(bohr_.frequencies.size()); ++w) {
        const Mat pi_w = bohr_.component_superop(w);
        for (int k = 0; k < static_cast<int>(s_.size()); ++k)
            for (int kp = 0; kp < static_cast<int>(s_.size()); ++kp) {
                const Mat comm = commutator_superop(s_[k]);
                terms_.push_back({bohr_.frequencies[w], k, kp, comm * pi_w * left_mult(s_[kp]),
                                  -comm * pi_w * right_mult(s_[kp])});
            }
    }
}

double WeakCouplingModel::max_frequency() const {
    double wmax = 0;
    for (double w : bohr_.frequencies) wmax = std::max(wmax, std::abs(w));
    return bath_->grid().omega_max() - wmax;
}

void WeakCouplingModel::check_range(double w) const {
    if (std::abs(w) > max_frequency())
        throw std::out_of_range("weak coupling: w=" + std::to_string(w) + " needs bath values outside the grid (|w| <= " +
                                std::to_string(max_frequency()) + ")");
}

Mat WeakCouplingModel::dissipator(Complex z) const {
    if (z.imag() == 0.0) return dissipator(z.real());
    const int d2 = dim() * dim();
    Mat out = Mat::Zero(d2, d2);
    for (const auto& t : terms_) {
        const Complex gp = bath_->g(z + t.omega_tilde, t.k, t.kp);
        const Complex gm = std::conj(bath_->g(-std::conj(z) - t.omega_tilde, t.k, t.kp));
        out += gp * t.t1 - gm * t.t2;
    }
    return out;
}

Mat WeakCouplingModel::dissipator(double w) const {
    check_range(w);
    const int d2 = dim() * dim();
    Mat out = Mat::Zero(d2, d2);
    for (const auto& t : terms_) {
        const Complex gp = bath_->g(w + t.omega_tilde)(t.k, t.kp);
        const Complex gm = std::conj(bath_->g(-w - t.omega_tilde)(t.k, t.kp));
        out += gp * t.t1 - gm * t.t2;
    }
    return out;
}

Mat WeakCouplingModel::shift(double w) const {
    check_range(w);
    const int d2 = dim() * dim();
    Mat out = Mat::Zero(d2, d2);
    for (const auto& t : terms_) {
        const Complex sp = bath_->s(w + t.omega_tilde)(t.k, t.kp);
        const Complex sm = std::conj(bath_->s(-w - t.omega_tilde)(t.k, t.kp));
        out += sp * t.t1 - sm * t.t2;
    }
    return out;
}

Mat WeakCouplingModel::relaxator(double w) const {
    check_range(w);
    const int d2 = dim() * dim();
    Mat out = Mat::Zero(d2, d2);
    for (const auto& t : terms_) {
        const Complex gp = bath_->gamma(w + t.omega_tilde)(t.k, t.kp);
        const Complex gm = std::conj(bath_->gamma(-w - t.omega_tilde)(t.k, t.kp));
        out += gp * t.t1 + gm * t.t2;
    }
    return out;
}

Mat relaxator_weak(const WeakCouplingModel& model, double w) { return model.relaxator(w); }
Mat shift_weak(const WeakCouplingModel& model, double w) { return model.shift(w); }

WeakLiouvillian::WeakLiouvillian(std::shared_ptr<const WeakCouplingModel> model) : model_(std::move(model)) {
    if (!model_) throw std::invalid_argument("WeakLiouvillian: null model");
}

Mat WeakLiouvillian::at(double w) const {
    {
        std::shared_lock lk(mu_);
        auto it = cache_.find(w);
        if (it != cache_.end()) return it->second;
    }
    Mat l = model_->l_p() + model_->dissipator(w);
    std::unique_lock lk(mu_);
    return cache_.emplace(w, std::move(l)).first->second;
}

Mat WeakLiouvillian::at(Complex z) const {
    if (z.imag() == 0.0) return at(z.real());
    return model_->l_p() + model_->dissipator(z);
}

std::size_t WeakLiouvillian::cache_size() const {
    std::shared_lock lk(mu_);
    return cache_.size();
}

std::shared_ptr<WeakLiouvillian> liouvillian_weak(std::shared_ptr<const WeakCouplingModel> model) {
    return std::make_shared<WeakLiouvillian>(std::move(model));
}

ExactFreqLiouvillian::ExactFreqLiouvillian(std::shared_ptr<const ExactRelaxator> rel, double eps)
    : rel_(std::move(rel)), eps_(eps) {
    if (!rel_) throw std::invalid_argument("ExactFreqLiouvillian: null relaxator");
    if (!(eps_ > 0)) throw std::invalid_argument("ExactFreqLiouvillian: eps must be positive");
}

Mat ExactFreqLiouvillian::at(Complex z) const {
    if (z.imag() == 0.0) return at(z.real());
    return rel_->liouvillian(z);
}

Mat QubitCoupling::matrix() const {
    Mat s(2, 2);
    s << s_g, std::conj(s_eg), s_eg, s_e;
    return s;
}

QubitLiouvillian::QubitLiouvillian(double omega0, QubitCoupling s, std::shared_ptr<const BathCorrelation> bath,
                                   QubitForm form)
    : omega0_(omega0), s_(s), bath_(std::move(bath)), form_(form) {
    if (!(omega0_ > 0)) throw std::invalid_argument("qubit_liouvillian: omega0 must be positive");
    if (!bath_) throw std::invalid_argument("qubit_liouvillian: bath required");
    if (bath_->channels() != 1) throw std::invalid_argument("qubit_liouvillian: scalar bath required");
    if (bath_->mode() != BathMode::thermal) throw std::invalid_argument("qubit_liouvillian: thermal bath required");
    l_p_ = commutator_superop(qubit_hamiltonian(omega0_));
}

std::vector<Mat> QubitLiouvillian::apply_z(Complex z, const std::vector<Mat>& rhos, Part part) const {
    const double w0 = omega0_;
    const Complex sg = s_.s_g, se = s_.s_e, seg = s_.s_eg, sge = std::conj(s_.s_eg);

    // (coefficient of X, coefficient of its conjugate partner) for argument x
    auto coeffs = [&](Complex x) -> std::pair<Complex, Complex> {
        const double kms = form_ == QubitForm::printed ? std::exp(-x.real() / bath_->temperature()) : 0.0;
        if (part == Part::full) {
            const Complex gp = bath_->g(x, 0, 0);
            if (form_ == QubitForm::printed) return {gp, -std::exp(-x / bath_->temperature()) * gp};
            return {gp, std::conj(bath_->g(-std::conj(x), 0, 0))};
        }
        const double xr = x.real();
        if (part == Part::shift) {
            const double sp = bath_->s(xr)(0, 0).real();
            if (form_ == QubitForm::printed) return {sp, -kms * sp};
            return {sp, bath_->s(-xr)(0, 0).real()};
        }
        const double gp = bath_->gamma(xr)(0, 0).real();
        if (form_ == QubitForm::printed) return {gp, -kms * gp};
        return {gp, -bath_->gamma(-xr)(0, 0).real()};
    };
    const auto [g0, g0m] = coeffs(z);
    const auto [gp, gpm] = coeffs(z + w0);
    const auto [gm, gmm] = coeffs(z - w0);

    Mat sp = Mat::Zero(2, 2), sm = Mat::Zero(2, 2), s3 = Mat::Zero(2, 2);
    sp(1, 0) = 1;
    sm(0, 1) = 1;
    s3(0, 0) = -1;
    s3(1, 1) = 1;
    const Mat comm_pg = seg * sp - sge * sm;
    const Mat v = (sg - se) * sm + seg * s3;
    const Mat wop = (se - sg) * sp - sge * s3;

    std::vector<Mat> outs;
    outs.reserve(rhos.size());
    for (const Mat& rho : rhos) {
        const Complex rg = rho(0, 0), re = rho(1, 1), reg = rho(1, 0), rge = rho(0, 1);
        const Complex a = (sg * rg + sge * reg) - (se * re + seg * rge);
        const Complex at = (sg * rg + seg * rge) - (se * re + sge * reg);
        const Complex b = sg * rge + sge * re;
        const Complex bt = sg * reg + seg * re;
        const Complex c = se * reg + seg * rg;
        const Complex ct = se * rge + sge * rg;

        Mat out = Mat::Zero(2, 2);
        if (part == Part::full) out += w0 * (reg * sp - rge * sm);
        out += comm_pg * (g0 * a + g0m * at);
        out += v * (gp * b + gpm * ct);
        out += wop * (gm * c + gmm * bt);
        outs.push_back(std::move(out));
    }
    return outs;
}

Mat QubitLiouvillian::apply(double w, const Mat& rho) const {
    if (std::abs(w) > max_frequency()) throw std::out_of_range("qubit_liouvillian: w outside bath grid");
    return apply_z(Complex(w, 0.0), {rho}, Part::full).front();
}

Mat QubitLiouvillian::assemble(Complex z, Part part) const {
    std::vector<Mat> basis;
    for (int m = 0; m < 2; ++m)
        for (int n = 0; n < 2; ++n) {
            basis.push_back(Mat::Zero(2, 2));
            basis.back()(m, n) = 1;
        }
    const std::vector<Mat> cols = apply_z(z, basis, part);
    Mat out(4, 4);
    for (int j = 0; j < 4; ++j) out.col(j) = vectorize(cols[j]);
    return out;
}

Mat QubitLiouvillian::at(double w) const {
    if (std::abs(w) > max_frequency()) throw std::out_of_range("qubit_liouvillian: w outside bath grid");
    return assemble(Complex(w, 0.0), Part::full);
}

Mat QubitLiouvillian::at(Complex z) const {
    if (z.imag() == 0.0) return at(z.real());
    if (form_ == QubitForm::printed)
        throw std::invalid_argument("qubit_liouvillian: the printed form is defined on the real axis only");
    return assemble(z, Part::full);
}

Mat QubitLiouvillian::shift(double w) const {
    if (std::abs(w) > max_frequency()) throw std::out_of_range("qubit_liouvillian: w outside bath grid");
    return assemble(Complex(w, 0.0), Part::shift);
}

Mat QubitLiouvillian::relaxator(double w) const {
    if (std::abs(w) > max_frequency()) throw std::out_of_range("qubit_liouvillian: w outside bath grid");
    return assemble(Complex(w, 0.0), Part::relax);
}

std::shared_ptr<QubitLiouvillian> qubit_liouvillian(double omega0, QubitCoupling s,
                                                    std::shared_ptr<const BathCorrelation> bath, QubitForm form) {
    return std::make_shared<QubitLiouvillian>(omega0, s, std::move(bath), form);
}

Mat initial_corr_weak(const WeakCouplingModel& model, const std::vector<Mat>& drho_s, const CorrelationTable& g0,
                      double w) {
    const int kk = static_cast<int>(model.couplings().size());
    if (g0.values.empty() || g0.values.front().rows() != kk ||
        g0.values.front().cols() != static_cast<Eigen::Index>(drho_s.size()))
        throw std::invalid_argument("initial_corr_weak: correlation table shape must be K x L");
    const BohrSpectrum& bs = model.bohr();
    const int d = model.dim();
    Mat out = Mat::Zero(d, d);
    for (int wi = 0; wi < static_cast<int>(bs.frequencies.size()); ++wi) {
        const double x = w + bs.frequencies[wi];
        if (!g0.grid.contains(x))
            throw std::out_of_range("initial_corr_weak: w + w~ = " + std::to_string(x) + " outside the table");
        const Mat gv = g0.at(x);
        for (std::size_t l = 0; l < drho_s.size(); ++l) {
            const Mat comp = bs.component(drho_s[l], wi);
            for (int k = 0; k < kk; ++k) {
                const Mat& s = model.couplings()[k];
                out += gv(k, static_cast<Eigen::Index>(l)) * (s * comp - comp * s);
            }
        }
    }
    return out;
}

}  // namespace relax
