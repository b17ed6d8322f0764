#pragma once

// Optimal feedback controls: finite unitaries and norm-constrained
// instantaneous Hamiltonians that maximize overlap with a pure target.

#include <optional>

#include "qfb/qstate.hpp"

namespace qfb {

/// Bound mu on Tr[H^2] for a feedback Hamiltonian. mu = 0 disables feedback.
class FeedbackStrength {
 public:
  explicit FeedbackStrength(double mu);
  double mu() const { return mu_; }
  bool enabled() const { return mu_ > 0.0; }

 private:
  double mu_;
};

enum class FeedbackBranch { first_order, second_order, no_op };

const char* to_string(FeedbackBranch branch);

struct FeedbackDiagnostics {
  double a;                // <psi|rho^2|psi>
  double b;                // <psi|rho|psi>
  double commutator_norm;  // ||[psi psi^dagger, rho]||_F
};

struct FeedbackDecision {
  FeedbackBranch branch;
  HermitianObservable hamiltonian;
  FeedbackDiagnostics diagnostics;
};

/// U = sum_j |sigma_j><rho_j| pairing descending eigenvectors of rho with
/// descending eigenvectors of the target.
UnitaryOperator optimal_unitary(const DensityMatrix& rho, const DensityMatrix& target);

/// Default degeneracy threshold 1e-8 ||rho||_F.
double default_degeneracy_tolerance(const DensityMatrix& rho);

/// Greedy optimal feedback Hamiltonian with Tr[H^2] = mu.
///  - first_order when ||[sigma, rho]||_F > tolerance: H = i chi [sigma, rho];
///  - second_order when psi is an eigenvector of rho but not the top one:
///    H = sqrt(mu/2) (|1><psi| + |psi><1|), |1> the top eigenvector made
///    orthogonal to psi;
///  - no_op otherwise (or when feedback is disabled), H = 0.
FeedbackDecision optimal_feedback(const DensityMatrix& rho, const PureState& target,
                                  FeedbackStrength mu,
                                  std::optional<double> degeneracy_tolerance = std::nullopt);

/// First-order overlap gain -i <psi|[H, rho]|psi>.
double first_order_gain(const HermitianObservable& h, const DensityMatrix& rho,
                        const PureState& target);

/// Second-order gain sum_n (lambda_n - lambda_T) |<n|H|psi>|^2, valid when psi
/// is an eigenvector of rho. Throws std::invalid_argument otherwise.
double second_order_gain(const HermitianObservable& h, const DensityMatrix& rho,
                         const PureState& target,
                         std::optional<double> degeneracy_tolerance = std::nullopt);

}  // namespace qfb
