#include "relax/pauli.hpp"

#include <Eigen/Eigenvalues>
#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/strong_components.hpp>
#include <cmath>
#include <stdexcept>

namespace relax {

namespace {

Mat basis_change(const Mat& u) { return kron(u, u.conjugate()); }

}  // namespace

Mat superop_components(const Mat& super, const Mat& u) {
    const Mat t = basis_change(u);
    if (t.rows() != super.rows()) throw std::invalid_argument("superop_components: dimension mismatch");
    return t.adjoint() * super * t;
}

Mat superop_from_components(const Mat& comp, const Mat& u) {
    const Mat t = basis_change(u);
    return t * comp * t.adjoint();
}

PauliRates pauli_rates(const Mat& gamma0, const BohrSpectrum& bs, double temperature, double tol) {
    const int d = bs.dim();
    const Mat c = superop_components(gamma0, bs.vectors);
    PauliRates pr;
    pr.energies = bs.energies;
    pr.temperature = temperature;
    pr.w = RMat::Zero(d, d);
    for (int n = 0; n < d; ++n) {
        Complex col = 0;
        for (int r = 0; r < d; ++r) col += c(r * d + r, n * d + n);
        pr.conservation_error = std::max(pr.conservation_error, std::abs(col));
        for (int r = 0; r < d; ++r)
            if (r != n) pr.w(r, n) = -c(r * d + r, n * d + n).real();
    }
    const double scale = std::max(1.0, gamma0.cwiseAbs().maxCoeff());
    if (pr.conservation_error > tol * scale)
        throw std::runtime_error("pauli_rates: trace conservation violated (" + std::to_string(pr.conservation_error) +
                                 ")");
    for (int n = 0; n < d; ++n) pr.w(n, n) = -(pr.w.col(n).sum() - pr.w(n, n));
    return pr;
}

PauliRates pauli_rates_weak(const WeakCouplingModel& model) {
    const BohrSpectrum& bs = model.bohr();
    const int d = bs.dim();
    const auto& s = model.couplings();
    const int kk = static_cast<int>(s.size());
    std::vector<Mat> se(kk);
    for (int k = 0; k < kk; ++k) se[k] = bs.to_eigenbasis(s[k]);
    PauliRates pr;
    pr.energies = bs.energies;
    pr.temperature = model.bath().temperature();
    pr.w = RMat::Zero(d, d);
    for (int r = 0; r < d; ++r)
        for (int n = 0; n < d; ++n) {
            if (r == n) continue;
            const Mat g = model.bath().gamma(bs.energies(n) - bs.energies(r));
            Complex acc = 0;
            for (int k = 0; k < kk; ++k)
                for (int kp = 0; kp < kk; ++kp) acc += g(k, kp) * std::conj(se[k](r, n)) * se[kp](r, n);
            pr.w(r, n) = 2 * acc.real();
        }
    for (int n = 0; n < d; ++n) pr.w(n, n) = -(pr.w.col(n).sum() - pr.w(n, n));
    return pr;
}

BalanceReport detailed_balance_check(const PauliRates& pr, double temperature) {
    const int d = static_cast<int>(pr.w.rows());
    BalanceReport rep;
    double wmax = 0;
    for (int r = 0; r < d; ++r)
        for (int n = 0; n < d; ++n)
            if (r != n) wmax = std::max(wmax, std::abs(pr.w(r, n)));
    for (int r = 0; r < d; ++r)
        for (int n = 0; n < d; ++n) {
            if (r == n) continue;
            const double boltz = std::isinf(temperature) ? 1.0 : std::exp(-(pr.energies(n) - pr.energies(r)) / temperature);
            const double viol = wmax > 0 ? std::abs(pr.w(n, r) - boltz * pr.w(r, n)) / wmax : 0.0;
            const double ratio = pr.w(r, n) != 0 ? pr.w(n, r) / pr.w(r, n) : std::nan("");
            rep.rows.push_back({r, n, pr.w(r, n), ratio, viol});
            rep.max_violation = std::max(rep.max_violation, viol);
        }
    return rep;
}

PauliStationary stationary_pauli(const PauliRates& pr, double rate_threshold) {
    const int d = static_cast<int>(pr.w.rows());
    double wmax = 0;
    for (int r = 0; r < d; ++r)
        for (int n = 0; n < d; ++n)
            if (r != n) wmax = std::max(wmax, pr.w(r, n));
    const double thr = rate_threshold * std::max(wmax, 1.0);

    using Graph = boost::adjacency_list<boost::vecS, boost::vecS, boost::directedS>;
    Graph g(d);
    for (int r = 0; r < d; ++r)
        for (int n = 0; n < d; ++n)
            if (r != n && pr.w(r, n) > thr) boost::add_edge(n, r, g);
    std::vector<int> comp(d);
    const int ncomp = boost::strong_components(g, comp.data());

    std::vector<char> open(ncomp, 0);
    for (int r = 0; r < d; ++r)
        for (int n = 0; n < d; ++n)
            if (r != n && pr.w(r, n) > thr && comp[r] != comp[n]) open[comp[n]] = 1;

    PauliStationary out;
    for (int c = 0; c < ncomp; ++c) {
        if (open[c]) continue;
        std::vector<int> members;
        for (int i = 0; i < d; ++i)
            if (comp[i] == c) members.push_back(i);
        const int m = static_cast<int>(members.size());
        RMat mc(m, m);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) mc(a, b) = a == b ? 0.0 : pr.w(members[a], members[b]);
        for (int b = 0; b < m; ++b) mc(b, b) = -mc.col(b).sum();
        RVec v = RVec::Ones(m);
        if (m > 1) {
            Eigen::EigenSolver<RMat> es(mc);
            Eigen::Index best = 0;
            es.eigenvalues().cwiseAbs().minCoeff(&best);
            v = es.eigenvectors().col(best).real();
            v /= v.sum();
        }
        if (v.minCoeff() < -1e-8)
            throw std::runtime_error("stationary_pauli: null vector has negative entry " + std::to_string(v.minCoeff()));
        v = v.cwiseMax(0.0);
        v /= v.sum();
        RVec full = RVec::Zero(d);
        for (int a = 0; a < m; ++a) full(members[a]) = v(a);
        out.classes.push_back(members);
        out.per_class.push_back(full);
    }
    out.unique = out.classes.size() == 1;
    if (out.unique) out.p = out.per_class[0];
    return out;
}

RVec gibbs_distribution(const RVec& energies, double temperature) {
    const Eigen::Index d = energies.size();
    if (std::isinf(temperature)) return RVec::Constant(d, 1.0 / static_cast<double>(d));
    const double e0 = energies.minCoeff();
    RVec p = (-(energies.array() - e0) / temperature).exp().matrix();
    return p / p.sum();
}

}  // namespace relax
