#pragma once

// Generalized measurements: construction, validation and application of
// measurement operator sets {Omega_n} with sum_n Omega_n^dagger Omega_n = I.

#include <span>
#include <vector>

#include "qfb/qstate.hpp"
#include "qfb/rng.hpp"

namespace qfb {

namespace tol {
inline constexpr double kPovm = 1e-8;
inline constexpr double kProbability = 1e-14;
}  // namespace tol

enum class MeasurementKind {
  general,
  pure,        // every operator Hermitian positive semidefinite
  projective,  // pure, and every operator idempotent
};

class MeasurementOperatorSet {
 public:
  /// Validates completeness to `completeness_tolerance` and tags the kind.
  /// Throws std::invalid_argument on empty input, mixed dimensions or a
  /// completeness residual (max-abs entry) above the tolerance.
  explicit MeasurementOperatorSet(std::vector<ComplexMatrix> ops,
                                  double completeness_tolerance = tol::kPovm);

  std::span<const ComplexMatrix> operators() const { return ops_; }
  const ComplexMatrix& op(std::size_t n) const { return ops_.at(n); }
  std::size_t size() const { return ops_.size(); }
  int dim() const { return static_cast<int>(ops_.front().rows()); }
  MeasurementKind kind() const { return kind_; }
  double completeness_residual() const { return residual_; }

  /// Tr[Omega_n^dagger Omega_n rho] for every outcome.
  std::vector<double> probabilities(const DensityMatrix& rho) const;

 private:
  std::vector<ComplexMatrix> ops_;
  MeasurementKind kind_;
  double residual_;
};

/// max-abs entry of sum_n Omega_n^dagger Omega_n - I.
double completeness_residual(std::span<const ComplexMatrix> ops);

struct MeasurementOutcome {
  std::size_t index;
  double probability;
  DensityMatrix post_state;
};

/// Two-outcome qubit measurement with strength kappa, rotated on the Bloch
/// sphere by U(theta, phi).
struct KappaMeasurement {
  double kappa;
  double theta;
  double phi = 0.0;
};

/// Discretized Gaussian weak measurement of Q over a time step dt:
/// Omega_alpha ~ exp(-k dt (Q - alpha)^2), with the prefactor fixed
/// numerically so that the grid sum is complete. The grid must be uniformly
/// spaced. Throws std::invalid_argument if k or dt are not positive or the
/// grid cannot reach completeness within tol::kPovm.
MeasurementOperatorSet gaussian_weak_povm(const HermitianObservable& q, double k,
                                          double dt, std::span<const double> alpha_grid);

/// Uniform grid centred on Tr[Q rho] with half-width
/// 6 / sqrt(2 k dt) + spectral radius of Q.
std::vector<double> default_alpha_grid(const HermitianObservable& q, double k, double dt,
                                       const DensityMatrix& rho, int points = 2048);

/// Poisson-record pair Omega_0 = I - k Q^2 dt / 2, Omega_1 = sqrt(k dt) Q.
/// Complete only to O((k dt)^2); validated against that bound. Throws if
/// Omega_0 is not positive semidefinite.
MeasurementOperatorSet poisson_povm(const HermitianObservable& q, double k, double dt);

/// U(theta, phi): |0> -> cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>,
///                |1> -> cos(theta/2)|1> - e^{-i phi} sin(theta/2)|0>.
UnitaryOperator bloch_rotation(double theta, double phi);

MeasurementOperatorSet kappa_povm(const KappaMeasurement& m);

/// Probability and normalized post-state for outcome n. Throws
/// std::domain_error if the outcome probability is below tol::kProbability.
MeasurementOutcome apply_outcome(const MeasurementOperatorSet& set, const DensityMatrix& rho,
                                 std::size_t n);

/// Draws an outcome with probability Tr[Omega_n^dagger Omega_n rho].
MeasurementOutcome sample_outcome(const MeasurementOperatorSet& set, const DensityMatrix& rho,
                                  RngStream& stream);

/// sum_n Omega_n rho Omega_n^dagger, renormalized to unit trace.
DensityMatrix nonselective_apply(const MeasurementOperatorSet& set, const DensityMatrix& rho);

struct PolarDecomposition {
  UnitaryOperator unitary;
  ComplexMatrix positive;  // sqrt(Omega^dagger Omega)
};

/// Omega = U P. On the kernel of a singular Omega the unitary is completed
/// with the unitary factor closest to identity between the kernel and the
/// orthogonal complement of the range, so a PSD Omega yields U = I.
PolarDecomposition polar_split(const ComplexMatrix& omega);

}  // namespace qfb
