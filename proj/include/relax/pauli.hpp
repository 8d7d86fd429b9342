// pauli.hpp: Pauli master rates, detailed balance and the stationary Pauli distribution
#pragma once

#include "relax/liouville.hpp"
#include "relax/weak.hpp"

#include <vector>

namespace relax {

// A_rs,mn = <r| A(|m><n|) |s> in the given orthonormal basis (columns of u), flattened as
// row r*d + s, column m*d + n.
Mat superop_components(const Mat& super, const Mat& u);
// inverse of superop_components
Mat superop_from_components(const Mat& comp, const Mat& u);

struct PauliRates {
    RVec energies;
    RMat w;  // w(r, n) = rate n -> r for r != n; columns sum to zero
    double temperature = infinite_temperature;
    double conservation_error = 0;  // max |sum_r Gamma_rr,nn|
};

// W_rn = -Gamma_rr,nn in the eigenbasis of bs. Throws if trace conservation fails beyond tol.
PauliRates pauli_rates(const Mat& gamma0, const BohrSpectrum& bs, double temperature = infinite_temperature,
                       double tol = 1e-9);

// W_rn = 2 sum_kk' gamma_kk'(eps_n - eps_r) conj((S_k)_rn) (S_k')_rn
PauliRates pauli_rates_weak(const WeakCouplingModel& model);

struct BalanceReport {
    double max_violation = 0;  // max |W_nr - e^{-(eps_n - eps_r)/T} W_rn| / max W
    struct Row {
        int r, n;
        double w, ratio, violation;
    };
    std::vector<Row> rows;  // r != n
};

BalanceReport detailed_balance_check(const PauliRates& pr, double temperature);

struct PauliStationary {
    RVec p;                               // the distribution, when unique
    bool unique = true;
    std::vector<std::vector<int>> classes;  // closed communicating classes
    std::vector<RVec> per_class;            // one stationary vector per closed class
};

// Null vector of the rate generator; reducible chains return one solution per closed class.
PauliStationary stationary_pauli(const PauliRates& pr, double rate_threshold = 1e-12);

RVec gibbs_distribution(const RVec& energies, double temperature);

}  // namespace relax
