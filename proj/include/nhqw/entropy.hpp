#pragma once

// Second-order Renyi entropy of a two-photon state and the similarity
// measures used to compare distributions.
//
// The exact estimator works on the symmetric first-quantized amplitude
// matrix phi (Frobenius norm 1): the one-photon reduced density matrix is
// rho_A = phi phi^dag, so tr rho_A^n is a sum of singular values to the
// 2n-th power. The diagonal estimator works on a normalized coincidence
// distribution only: with x_i the bunched weights and w_ij (i < j) the
// unordered split weights, tr rho_A^2 is approximated by
// sum_i (x_i + f_i)^2 with f_i = sum_{j<i} w_ji, which drops every
// interference term that intensity measurements cannot see. The two agree
// exactly on states with weight only on the bunched diagonal.

#include "nhqw/pair.hpp"
#include "nhqw/types.hpp"

namespace nhqw {

struct EntropyResult {
    enum class Estimator { diagonal, exact };
    double s2 = 0.0;
    Estimator estimator = Estimator::exact;
    double survival_p2 = 1.0;
};

// Exact S2 = -log tr rho_A^2 of a normalized pure two-photon state. Throws
// NumericalError when phi is not normalized to 1e-6 or not symmetric.
EntropyResult renyi2_exact(const Matrix& phi);

// Generic order-n Renyi entropy (1/(1-n)) log tr rho_A^n of the same state.
double renyi_n(const Matrix& phi, double n);

// Diagonal-only estimator evaluated on the normalized coincidence matrix.
EntropyResult renyi2_diagonal(const CorrelationMatrix& gamma);

// S_norm = s2_asym - s2_sym for matched settings.
double normalized_entropy(double s2_asym, double s2_sym);

// Q = (sum sqrt(p q))^2 / (sum p * sum q); 1 iff p and q are proportional.
double similarity(const RealVector& p, const RealVector& q);
double similarity(const RealMatrix& g1, const RealMatrix& g2);

}  // namespace nhqw
