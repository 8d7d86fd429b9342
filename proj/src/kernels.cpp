#include "relax/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace relax::kernels {

namespace {

void check_grid(const RVec& x, Eigen::Index nf) {
    if (x.size() < 3) throw std::invalid_argument("kernels: grid needs at least 3 nodes");
    if (x.size() != nf) throw std::invalid_argument("kernels: grid/value length mismatch");
}

Complex pv_node(const RVec& x, const Vec& f, Eigen::Index j) {
    const Eigen::Index n = x.size();
    const double h = x(1) - x(0);
    const double a = x(0), b = x(n - 1);
    const Complex fj = f(j);
    Complex sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (i == j) continue;
        const double w = (i == 0 || i == n - 1) ? 0.5 * h : h;
        sum += w * (f(i) - fj) / (x(j) - x(i));
    }
    Complex deriv;
    if (j == 0)
        deriv = (f(1) - f(0)) / h;
    else if (j == n - 1)
        deriv = (f(n - 1) - f(n - 2)) / h;
    else
        deriv = (f(j + 1) - f(j - 1)) / (2.0 * h);
    const double wj = (j == 0 || j == n - 1) ? 0.5 * h : h;
    sum -= wj * deriv;
    const double lo = std::max(x(j) - a, 0.5 * h);
    const double hi = std::max(b - x(j), 0.5 * h);
    sum += fj * std::log(lo / hi);
    return sum;
}

}  // namespace

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

Vec pv_serial(const RVec& x, const Vec& f) {
    check_grid(x, f.size());
    Vec out(x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) out(j) = pv_node(x, f, j);
    return out;
}

Vec pv_parallel(const RVec& x, const Vec& f) {
    check_grid(x, f.size());
    Vec out(x.size());
    const long n = static_cast<long>(x.size());
#pragma omp parallel for schedule(static)
    for (long j = 0; j < n; ++j) out(j) = pv_node(x, f, j);
    return out;
}

Complex interp_uniform(const RVec& x, const Vec& f, double at) {
    const Eigen::Index n = x.size();
    if (!(at >= x(0) && at <= x(n - 1)))
        throw std::out_of_range("frequency " + std::to_string(at) + " outside grid [" + std::to_string(x(0)) +
                                ", " + std::to_string(x(n - 1)) + "]");
    const double h = x(1) - x(0);
    const double r = (at - x(0)) / h;
    // nodes are returned exactly
    const auto j = static_cast<Eigen::Index>(std::llround(r));
    if (std::abs(r - static_cast<double>(j)) < 1e-9) return f(std::clamp<Eigen::Index>(j, 0, n - 1));
    auto i = static_cast<Eigen::Index>(std::floor(r));
    if (i >= n - 1) i = n - 2;
    if (i < 0) i = 0;
    const double t = (at - x(i)) / h;
    return (1.0 - t) * f(i) + t * f(i + 1);
}

Complex cauchy_point(const RVec& x, const Vec& f, Complex z) {
    if (z.imag() == 0.0) throw std::invalid_argument("cauchy_point: z must be off the real axis");
    const Eigen::Index n = x.size();
    const double h = x(1) - x(0);
    const double a = x(0), b = x(n - 1);
    const double xr = z.real();
    Complex fx = 0.0, df = 0.0;
    if (xr >= a && xr <= b) {
        const Eigen::Index i = std::min<Eigen::Index>(static_cast<Eigen::Index>((xr - a) / h), n - 2);
        fx = interp_uniform(x, f, xr);
        df = (f(i + 1) - f(i)) / h;
    }
    // subtract fx + df (T - xr); both pieces integrate in closed form
    Complex sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double w = (i == 0 || i == n - 1) ? 0.5 * h : h;
        sum += w * (f(i) - fx - df * (x(i) - xr)) / (z - x(i));
    }
    // int_a^b dT / (z - T) = log(z - a) - log(z - b);  (T - xr)/(z - T) = -1 + (z - xr)/(z - T)
    const Complex lg = std::log(z - a) - std::log(z - b);
    sum += fx * lg + df * (-(b - a) + (z - xr) * lg);
    return sum;
}

Vec cauchy_serial(const RVec& x, const Vec& f, const std::vector<Complex>& z) {
    check_grid(x, f.size());
    Vec out(static_cast<Eigen::Index>(z.size()));
    for (std::size_t k = 0; k < z.size(); ++k) out(static_cast<Eigen::Index>(k)) = cauchy_point(x, f, z[k]);
    return out;
}

Vec cauchy_parallel(const RVec& x, const Vec& f, const std::vector<Complex>& z) {
    check_grid(x, f.size());
    Vec out(static_cast<Eigen::Index>(z.size()));
    const long n = static_cast<long>(z.size());
#pragma omp parallel for schedule(static)
    for (long k = 0; k < n; ++k) out(k) = cauchy_point(x, f, z[static_cast<std::size_t>(k)]);
    return out;
}

}  // namespace relax::kernels
