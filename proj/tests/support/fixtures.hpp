#pragma once

// Random operators and states for property tests, plus small independent
// oracles that avoid the library's own linear algebra.

#include <random>
#include <vector>

#include "qfb/povm.hpp"
#include "qfb/qstate.hpp"

namespace qfb::testing {

using Rng = std::mt19937_64;

ComplexMatrix ginibre(int n, Rng& rng);
HermitianObservable random_hermitian(int n, Rng& rng);
/// Haar-distributed unitary via QR of a Ginibre matrix.
ComplexMatrix haar_unitary(int n, Rng& rng);
PureState random_pure(int n, Rng& rng);
/// Full-rank random state G G^dagger / Tr.
DensityMatrix random_density(int n, Rng& rng);

/// Pure measurement P_j = sqrt(E_j) with E_j = S^{-1/2} B_j S^{-1/2},
/// B_j = G_j G_j^dagger, S = sum_j B_j.
std::vector<ComplexMatrix> random_pure_povm(int n, int outcomes, Rng& rng);
/// Random unitaries times the operators of a random pure measurement.
std::vector<ComplexMatrix> random_general_povm(int n, int outcomes, Rng& rng);

/// Hermitian H with Tr[H^2] = mu.
ComplexMatrix random_hamiltonian(int n, double mu, Rng& rng);

/// exp(A) by scaling and squaring of a Taylor series.
ComplexMatrix expm_series(const ComplexMatrix& a);

/// Eigenvalues of a Hermitian matrix, descending, from Eigen directly.
std::vector<double> eigenvalues_desc(const ComplexMatrix& m);

/// Square root of a Hermitian PSD matrix.
ComplexMatrix sqrtm_psd(const ComplexMatrix& m);

}  // namespace qfb::testing
