// kernels.hpp: frequency-grid kernels, each with a serial reference and an OpenMP version
#pragma once

#include "relax/liouville.hpp"

#include <exception>
#include <mutex>
#include <vector>

namespace relax::kernels {

// P int f(T)/(x_j - T) dT at every node x_j of a uniform grid x, by singularity
// subtraction plus trapezoid. The self term uses the centred derivative -f'(x_j).
// Edge nodes use a half-step regularized log term.
Vec pv_serial(const RVec& x, const Vec& f);
Vec pv_parallel(const RVec& x, const Vec& f);

// int f(T)/(z - T) dT over the grid for z off the real axis; f(Re z) and f'(Re z) subtracted and
// integrated in closed form. Accurate for Im z of at least one grid step.
Complex cauchy_point(const RVec& x, const Vec& f, Complex z);
Vec cauchy_serial(const RVec& x, const Vec& f, const std::vector<Complex>& z);
Vec cauchy_parallel(const RVec& x, const Vec& f, const std::vector<Complex>& z);

// Linear interpolation on a uniform grid; throws std::out_of_range outside [x_0, x_{n-1}].
Complex interp_uniform(const RVec& x, const Vec& f, double at);

int max_threads();

template <class F>
auto serial_map(std::size_t n, F&& f) -> std::vector<decltype(f(std::size_t{}))> {
    std::vector<decltype(f(std::size_t{}))> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
}

// out[i] = f(i) with dynamic scheduling; the first exception thrown by a worker is rethrown.
template <class F>
auto parallel_map(std::size_t n, F&& f) -> std::vector<decltype(f(std::size_t{}))> {
    std::vector<decltype(f(std::size_t{}))> out(n);
    std::exception_ptr err;
    std::mutex mu;
    const long nn = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < nn; ++i) {
        try {
            out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard<std::mutex> lk(mu);
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
    return out;
}

}  // namespace relax::kernels
