// markov.hpp: Markov limit L(0) and the secular (Lindblad) relaxator
#pragma once

#include "relax/weak.hpp"

#include <memory>

namespace relax {

// L(w) frozen at w = 0
std::shared_ptr<ConstantLiouvillian> markov_limit(const FreqLiouvillian& fl);

struct SecularParts {
    Mat h_ls;       // sum s_kk'(w~) S_k(w~)^dagger S_k'(w~)
    Mat relaxator;  // sum gamma_kk'(w~) ({S_k^dagger S_k', .} - 2 S_k' . S_k^dagger)
    Mat l;          // [H_P + H_LS, .] - i relaxator
};

SecularParts secular_parts(const WeakCouplingModel& model);
std::shared_ptr<ConstantLiouvillian> secular_liouvillian(const WeakCouplingModel& model);

// e^{-i L t}
Mat propagator(const Mat& l, double t);

// Choi matrix sum_mn |m><n| (x) Phi(|m><n|) of a superoperator on d-level operators
Mat choi_matrix(const Mat& map);
double min_choi_eigenvalue(const Mat& map);

}  // namespace relax
