#include "doctest.h"
#include "helpers.hpp"

#include "relax/checks.hpp"
#include "relax/kernels.hpp"
#include "relax/weak.hpp"

#include <cmath>
#include <numbers>

using namespace relax;
using namespace testing_util;

namespace {

std::shared_ptr<const BathCorrelation> gauss_bath(BathMode mode, double t, double omega_max = 20.0, int n = 4001) {
    auto f = [](double w) { return 0.08 * std::exp(-0.5 * w * w) + 0.02 * std::exp(-0.5 * (w - 1.5) * (w - 1.5)); };
    return std::make_shared<const BathCorrelation>(gamma_phenomenological(f, mode, t, FreqGrid(omega_max, n)));
}

std::shared_ptr<const BathCorrelation> zero_bath() {
    return std::make_shared<const BathCorrelation>(
        gamma_phenomenological([](double) { return 0.0; }, BathMode::uniform, infinite_temperature, FreqGrid(10.0, 1001)));
}

// literal transcription of the qubit closed form with g(W) taken from the bath and its
// conjugate partners written through e^{-W/T}; Hermitian rho only
Mat qubit_closed_form(double w0, const QubitCoupling& s, const BathCorrelation& bath, double w, const Mat& rho) {
    const double t = bath.temperature();
    auto g = [&](double x) { return bath.g(x)(0, 0); };
    const Complex sg = s.s_g, se = s.s_e, seg = s.s_eg, sge = std::conj(s.s_eg);
    const Complex rg = rho(0, 0), re = rho(1, 1), reg = rho(1, 0), rge = rho(0, 1);
    const Complex a = (sg * rg + sge * reg) - (se * re + seg * rge);
    const Complex b = sg * rge + sge * re;
    const Complex c = se * reg + seg * rg;
    const Mat sp = sigma_plus(), sm = sigma_plus().adjoint();
    Mat s3 = Mat::Zero(2, 2);
    s3(0, 0) = -1;
    s3(1, 1) = 1;
    Mat out = w0 * (reg * sp - rge * sm);
    out += g(w) * (seg * sp - sge * sm) * (a - std::exp(-w / t) * std::conj(a));
    out += g(w + w0) * ((sg - se) * sm + seg * s3) * (b - std::exp(-(w + w0) / t) * std::conj(c));
    out -= g(w - w0) * ((sg - se) * sp + sge * s3) * (c - std::exp(-(w - w0) / t) * std::conj(b));
    return out;
}

}  // namespace

TEST_CASE("zero bath: unitary limit") {
    std::mt19937_64 rng(41);
    const Mat h = random_hermitian(rng, 3);
    auto model = std::make_shared<const WeakCouplingModel>(h, std::vector<Mat>{random_hermitian(rng, 3)}, zero_bath());
    const auto fl = liouvillian_weak(model);
    for (double w : {-2.0, 0.0, 1.3}) {
        CHECK(fl->relaxator(w).norm() < 1e-15);
        CHECK(fl->shift(w).norm() < 1e-15);
        CHECK((fl->at(w) - commutator_superop(h)).norm() < 1e-14);
    }
}

TEST_CASE("diagonal coupling leaves populations untouched") {
    std::mt19937_64 rng(42);
    Mat h = Mat::Zero(3, 3), s = Mat::Zero(3, 3);
    for (int i = 0; i < 3; ++i) h(i, i) = 0.7 * i, s(i, i) = 1.0 - 0.6 * i;
    auto model = std::make_shared<const WeakCouplingModel>(h, std::vector<Mat>{s}, gauss_bath(BathMode::thermal, 1.0));
    for (double w : {0.0, 0.4, -1.0}) {
        const Mat g = model->relaxator(w);
        const Mat rho = random_density(rng, 3);
        const Mat out = relax::apply(g, rho);
        for (int i = 0; i < 3; ++i) CHECK(std::abs(out(i, i)) < 1e-14);
        Mat diag = Mat::Zero(3, 3);
        for (int i = 0; i < 3; ++i) diag(i, i) = rho(i, i);
        CHECK(relax::apply(g, diag).norm() < 1e-14);
    }
}

TEST_CASE("qubit relaxator at w = 0 carries the population rates") {
    const auto bath = qubit_bath();
    const Complex seg(0.6, 0.3);
    QubitCoupling s{0, 0, seg};
    auto model = std::make_shared<const WeakCouplingModel>(qubit_hamiltonian(1.0), std::vector<Mat>{s.matrix()}, bath);
    const Mat g0 = model->relaxator(0.0);
    Mat pe = Mat::Zero(2, 2), pg = Mat::Zero(2, 2);
    pe(1, 1) = 1;
    pg(0, 0) = 1;
    const double n2 = std::norm(seg);
    const double down = 2 * bath->gamma(1.0)(0, 0).real() * n2, up = 2 * bath->gamma(-1.0)(0, 0).real() * n2;
    // d p / dt = -Gamma p on the population block
    CHECK(std::abs(relax::apply(g0, pe)(0, 0) + down) < 1e-12);
    CHECK(std::abs(relax::apply(g0, pe)(1, 1) - down) < 1e-12);
    CHECK(std::abs(relax::apply(g0, pg)(1, 1) + up) < 1e-12);
    CHECK(std::abs(relax::apply(g0, pg)(0, 0) - up) < 1e-12);
}

TEST_CASE("shift at zero for an even bath") {
    std::mt19937_64 rng(43);
    const auto bath = gauss_bath(BathMode::uniform, infinite_temperature);
    const Mat h = qubit_hamiltonian(1.0);
    {
        // degenerate H: only w~ = 0 occurs and the whole superoperator is s(0) times a fixed map
        auto model = std::make_shared<const WeakCouplingModel>(0.3 * Mat::Identity(2, 2),
                                                               std::vector<Mat>{QubitCoupling{0.3, -0.8, Complex(0.5, 0.2)}.matrix()}, bath);
        CHECK(model->shift(0.0).norm() < 1e-8);
    }
    {
        // diagonal S with w0 > 0: coherences see s(+-w0), which does not vanish
        auto model = std::make_shared<const WeakCouplingModel>(h, std::vector<Mat>{QubitCoupling{0.3, -0.8, 0}.matrix()}, bath);
        const Mat out = relax::apply(model->shift(0.0), sigma_plus());
        CHECK(std::abs(out(1, 0) + bath->s(1.0)(0, 0).real() * 1.21) < 1e-12);
    }
    auto model = std::make_shared<const WeakCouplingModel>(h, std::vector<Mat>{QubitCoupling{0.3, -0.8, Complex(0.5, 0.2)}.matrix()}, bath);
    const Mat sh = model->shift(0.0);
    for (int k = 0; k < 4; ++k) {
        const Mat rho = random_hermitian(rng, 2);
        CHECK(std::abs(hs_inner(rho, relax::apply(sh, rho))) < 1e-10);
    }
    CHECK(hermitian_quadratic_form(sh).norm() < 1e-10);
}

TEST_CASE("shift is the Hilbert transform of the relaxator") {
    std::mt19937_64 rng(44);
    const auto bath = gauss_bath(BathMode::thermal, 1.0, 20.0, 4001);
    auto model = std::make_shared<const WeakCouplingModel>(qubit_hamiltonian(1.0),
                                                           std::vector<Mat>{QubitCoupling{0.2, -0.4, Complex(0.7, 0.1)}.matrix()}, bath);
    const double h = bath->grid().step();
    const int half = static_cast<int>(std::floor(model->max_frequency() / h));
    RVec x(2 * half + 1);
    for (int i = 0; i < x.size(); ++i) x(i) = (i - half) * h;
    std::vector<Mat> gam;
    for (int i = 0; i < x.size(); ++i) gam.push_back(model->relaxator(x(i)));
    for (double w : {-1.0, 0.0, 0.5, 2.0}) {
        const int iw = half + static_cast<int>(std::lround(w / h));
        const Mat sh = model->shift(w);
        double dev = 0;
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) {
                Vec f(x.size());
                for (int i = 0; i < x.size(); ++i) f(i) = gam[i](r, c);
                const Complex ht = kernels::pv_serial(x, f)(iw) / std::numbers::pi;
                dev = std::max(dev, std::abs(ht - sh(r, c)));
            }
        CHECK(dev < 1e-4);
    }
}

TEST_CASE("printed daggered term equals its linear extension on Hermitian rho") {
    std::mt19937_64 rng(45);
    const auto bath = gauss_bath(BathMode::thermal, 0.7);
    const Mat h = random_hermitian(rng, 3);
    const Mat s = random_hermitian(rng, 3);
    auto model = std::make_shared<const WeakCouplingModel>(h, std::vector<Mat>{s}, bath);
    const auto& bs = model->bohr();
    for (double w : {0.0, 0.8}) {
        const Mat rho = random_hermitian(rng, 3);
        // sum gamma(w + w~)[S, (S rho)(w~)] + gamma*(-w - w~)[S, (S rho)(-w~)]^dagger
        Mat oracle = Mat::Zero(3, 3);
        for (std::size_t k = 0; k < bs.frequencies.size(); ++k) {
            const double wt = bs.frequencies[k];
            const int km = bs.index_of(-wt, 1e-9);
            const Mat x1 = bs.component(s * rho, static_cast<int>(k));
            const Mat x2 = bs.component(s * rho, km);
            const Mat c1 = s * x1 - x1 * s, c2 = s * x2 - x2 * s;
            oracle += bath->gamma(w + wt)(0, 0) * c1 + std::conj(bath->gamma(-w - wt)(0, 0)) * c2.adjoint();
        }
        CHECK((relax::apply(model->relaxator(w), rho) - oracle).norm() < 1e-12);
    }
}

TEST_CASE("constraint suite on weak-coupling Liouvilles") {
    std::mt19937_64 rng(46);
    for (auto mode : {BathMode::thermal, BathMode::uniform}) {
        const auto bath = gauss_bath(mode, mode == BathMode::thermal ? 0.8 : infinite_temperature);
        auto model = std::make_shared<const WeakCouplingModel>(random_hermitian(rng, 3), std::vector<Mat>{random_hermitian(rng, 3)}, bath);
        const auto fl = liouvillian_weak(model);
        const auto rep = liouvillian_invariants(*fl, {0.0, 0.3, 1.1, 2.5});
        CHECK(rep.trace < 1e-10);
        CHECK(rep.pairing_l < 1e-9);
        CHECK(rep.pairing_h < 1e-9);
        CHECK(rep.pairing_g < 1e-9);
        if (mode == BathMode::uniform) {
            CHECK(rep.min_gamma > -1e-9);
            CHECK(rep.evenness < 1e-9);
        }
        for (double w : {0.0, 0.9}) {
            const Mat rho = random_density(rng, 3);
            CHECK(std::abs(relax::apply(fl->shift(w), rho).trace()) < 1e-12);
            CHECK(std::abs(relax::apply(fl->relaxator(w), rho).trace()) < 1e-12);
            const Mat out = relax::apply(fl->at(w), rho), back = relax::apply(fl->at(-w), rho);
            CHECK((out.adjoint() + back).norm() < 1e-10);
        }
    }
}

TEST_CASE("qubit closed form") {
    const auto bath = qubit_bath();
    std::mt19937_64 rng(47);
    for (QubitCoupling s : {QubitCoupling{0, 0, Complex(1, 0)}, QubitCoupling{0.3, -0.5, Complex(0.4, 0.2)},
                            QubitCoupling{-1, 1, 0}}) {
        const auto ql = qubit_liouvillian(1.0, s, bath);
        auto model = std::make_shared<const WeakCouplingModel>(qubit_hamiltonian(1.0), std::vector<Mat>{s.matrix()}, bath);
        const auto wl = liouvillian_weak(model);
        for (double w : {-1.5, -0.2, 0.0, 0.7, 2.0}) {
            CHECK((ql->at(w) - wl->at(w)).norm() < 1e-10);
            CHECK((ql->shift(w) - wl->shift(w)).norm() < 1e-10);
            CHECK((ql->relaxator(w) - wl->relaxator(w)).norm() < 1e-10);
        }
        const Complex z(0.4, 0.3);
        CHECK((ql->at(z) - wl->at(z)).norm() < 1e-10);

        const auto printed = qubit_liouvillian(1.0, s, bath, QubitForm::printed);
        for (double w : {-0.6, 0.0, 1.2}) {
            const Mat rho = random_hermitian(rng, 2);
            CHECK((printed->apply(w, rho) - qubit_closed_form(1.0, s, *bath, w, rho)).norm() < 1e-12);
            CHECK((relax::apply(printed->at(w), rho) - printed->apply(w, rho)).norm() < 1e-12);
        }
        // canonical state is stationary in the printed form
        Mat rc = Mat::Zero(2, 2);
        rc(0, 0) = 1.0 / (1.0 + std::exp(-1.0));
        rc(1, 1) = 1.0 - rc(0, 0);
        CHECK(relax::apply(printed->at(0.0), rc).norm() < 1e-10);
    }
    // S_eg = 0: population block vanishes
    const auto ql = qubit_liouvillian(1.0, QubitCoupling{0.2, 0.9, 0}, bath);
    for (double w : {0.0, 0.5}) {
        const Mat l = ql->at(w);
        for (int r : {0, 3})
            for (int c : {0, 3}) CHECK(std::abs(l(r, c)) < 1e-15);
    }
}

TEST_CASE("cached evaluations are safe under concurrent reads") {
    std::mt19937_64 rng(48);
    auto model = std::make_shared<const WeakCouplingModel>(random_hermitian(rng, 3), std::vector<Mat>{random_hermitian(rng, 3)},
                                                           gauss_bath(BathMode::thermal, 1.0));
    const auto fl = liouvillian_weak(model);
    auto f = [&](std::size_t i) { return fl->at(-1.0 + 0.05 * double(i % 40)); };
    const auto par = kernels::parallel_map(400, f);
    CHECK(fl->cache_size() == 40);
    for (std::size_t i = 0; i < par.size(); ++i) REQUIRE((par[i] - model->dissipator(-1.0 + 0.05 * double(i % 40)) - model->l_p()).norm() < 1e-14);
}

TEST_CASE("grid range and model validation") {
    std::mt19937_64 rng(49);
    auto model = std::make_shared<const WeakCouplingModel>(qubit_hamiltonian(1.0), std::vector<Mat>{sigma_x()}, gauss_bath(BathMode::thermal, 1.0, 5.0, 501));
    CHECK(model->max_frequency() == doctest::Approx(4.0));
    CHECK_THROWS_AS(model->relaxator(4.5), std::out_of_range);
    CHECK_THROWS_AS(WeakCouplingModel(qubit_hamiltonian(1.0), {sigma_x(), sigma_x()}, gauss_bath(BathMode::thermal, 1.0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(WeakCouplingModel(qubit_hamiltonian(1.0), {sigma_plus()}, gauss_bath(BathMode::thermal, 1.0)),
                    std::invalid_argument);
}

TEST_CASE("initial correlations") {
    std::mt19937_64 rng(50);
    const FreqGrid grid(40.0, 8001);
    const double eps = 0.3;
    const auto ts = random_total(rng, 2, 4, 0.004);
    auto bath = std::make_shared<const BathCorrelation>(gamma_from_env_exact(ts, eps, grid));
    auto model = std::make_shared<const WeakCouplingModel>(ts.h(), std::vector<Mat>{ts.couplings()[0].s}, bath,
                                                           std::vector<Complex>{ts.mean_b(0)});
    Mat drs = random_hermitian(rng, 2);
    Mat dre = random_hermitian(rng, 4);
    dre -= (dre.trace() / 4.0) * Mat::Identity(4, 4);
    CorrelationTable zero{grid, std::vector<Mat>(grid.size(), Mat::Zero(1, 1))};
    CHECK(initial_corr_weak(*model, {drs}, zero, 0.3).norm() == 0.0);

    const auto g0 = g0_from_env_exact(ts, {dre}, eps, grid);
    for (double w : {-0.5, 0.2, 1.0}) {
        const Mat weak = initial_corr_weak(*model, {drs}, g0, w);
        CHECK(std::abs(weak.trace()) < 1e-12);
        const ExactRelaxator rel(ts);
        const Mat exact = rel.initial_correlation(kron(drs, dre), Complex(w, eps));
        CHECK((weak - exact).norm() < 0.1 * exact.norm());
    }

    // identity on the system side: only w~ = 0 survives, and it commutes with diagonal S
    Mat hd = Mat::Zero(2, 2), sd = Mat::Zero(2, 2);
    hd(1, 1) = 1;
    sd(0, 0) = 0.4;
    sd(1, 1) = -0.2;
    auto diag = std::make_shared<const WeakCouplingModel>(hd, std::vector<Mat>{sd}, bath);
    CHECK(initial_corr_weak(*diag, {Mat::Identity(2, 2)}, g0, 0.1).norm() < 1e-14);
}

TEST_CASE("weak coupling approaches the exact relaxator Liouville") {
    std::mt19937_64 rng(51);
    const Mat h = random_hermitian(rng, 2), he = random_hermitian(rng, 8), s = random_hermitian(rng, 2),
              b = random_hermitian(rng, 8);
    const FreqGrid grid(80.0, 16001);
    const double eps = 0.4;
    double prev = 1e300;
    for (double lam : {0.04, 0.02, 0.01}) {
        const TotalSystem ts(h, he, {{s, lam * b}});
        auto bath = std::make_shared<const BathCorrelation>(gamma_from_env_exact(ts, eps, grid));
        auto model = std::make_shared<const WeakCouplingModel>(h, std::vector<Mat>{s}, bath, std::vector<Complex>{ts.mean_b(0)});
        const ExactRelaxator rel(ts);
        double rel_err = 0;
        for (double w : {-0.7, 0.0, 0.9}) {
            const Mat d_exact = rel.liouvillian(Complex(w, eps)) - rel.l_p();
            const Mat d_weak = model->dissipator(w);
            rel_err = std::max(rel_err, (d_exact - d_weak).norm() / d_weak.norm());
        }
        MESSAGE("lambda " << lam << ": relative deviation " << rel_err);
        CHECK(rel_err < 0.6 * prev);  // third cumulant of a random B: O(lambda) relative correction
        prev = rel_err;
    }
}
