#include "qfb/feedback.hpp"

#include <cmath>
#include <stdexcept>

#include "trusted.hpp"

namespace qfb {

FeedbackStrength::FeedbackStrength(double mu) : mu_(mu) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) {
    throw std::invalid_argument("FeedbackStrength: mu must be finite and non-negative");
  }
}

const char* to_string(FeedbackBranch branch) {
  switch (branch) {
    case FeedbackBranch::first_order:
      return "first_order";
    case FeedbackBranch::second_order:
      return "second_order";
    case FeedbackBranch::no_op:
      return "no_op";
  }
  return "unknown";
}

UnitaryOperator optimal_unitary(const DensityMatrix& rho, const DensityMatrix& target) {
  if (rho.dim() != target.dim()) {
    throw std::invalid_argument("optimal_unitary: dimension mismatch");
  }
  const Spectrum r = eig_hermitian(rho.matrix());
  const Spectrum s = eig_hermitian(target.matrix());
  return detail::TrustedFactory::unitary(s.vectors * r.vectors.adjoint());
}

double default_degeneracy_tolerance(const DensityMatrix& rho) {
  return 1e-8 * rho.matrix().norm();
}

FeedbackDecision optimal_feedback(const DensityMatrix& rho, const PureState& target,
                                  FeedbackStrength mu, std::optional<double> degeneracy_tolerance) {
  const int n = rho.dim();
  if (target.dim() != n) throw std::invalid_argument("optimal_feedback: dimension mismatch");
  const double tau = degeneracy_tolerance.value_or(default_degeneracy_tolerance(rho));

  const ComplexVector& psi = target.vector();
  const ComplexVector v = rho.matrix() * psi;
  const double b = psi.dot(v).real();
  const double a = v.squaredNorm();
  // [sigma, rho] = |psi><v| - |v><psi|.
  const ComplexMatrix comm = psi * v.adjoint() - v * psi.adjoint();
  const double comm_norm = comm.norm();
  const FeedbackDiagnostics diag{a, b, comm_norm};

  if (!mu.enabled()) return {FeedbackBranch::no_op, HermitianObservable::zero(n), diag};

  if (comm_norm > tau) {
    // i[sigma, rho] is Hermitian; scale it to Tr[H^2] = mu.
    const Complex chi(0.0, std::sqrt(mu.mu()) / comm_norm);
    ComplexMatrix h = chi * comm;
    h = (h + h.adjoint()) * 0.5;
    return {FeedbackBranch::first_order, detail::TrustedFactory::hermitian(std::move(h)), diag};
  }

  const Spectrum s = eig_hermitian(rho.matrix());
  if (s.values(0) - b <= tau) return {FeedbackBranch::no_op, HermitianObservable::zero(n), diag};

  ComplexVector top = s.vectors.col(0);
  top -= psi * psi.dot(top);
  const double norm = top.norm();
  if (!(norm > tau)) return {FeedbackBranch::no_op, HermitianObservable::zero(n), diag};
  top /= norm;
  ComplexMatrix h = std::sqrt(0.5 * mu.mu()) * (top * psi.adjoint() + psi * top.adjoint());
  return {FeedbackBranch::second_order, detail::TrustedFactory::hermitian(std::move(h)), diag};
}

double first_order_gain(const HermitianObservable& h, const DensityMatrix& rho,
                        const PureState& target) {
  if (h.dim() != rho.dim() || target.dim() != rho.dim()) {
    throw std::invalid_argument("first_order_gain: dimension mismatch");
  }
  const ComplexVector& psi = target.vector();
  const Complex value = psi.dot(commutator(h.matrix(), rho.matrix()) * psi);
  return (Complex(0.0, -1.0) * value).real();
}

double second_order_gain(const HermitianObservable& h, const DensityMatrix& rho,
                         const PureState& target, std::optional<double> degeneracy_tolerance) {
  if (h.dim() != rho.dim() || target.dim() != rho.dim()) {
    throw std::invalid_argument("second_order_gain: dimension mismatch");
  }
  const double tau = degeneracy_tolerance.value_or(default_degeneracy_tolerance(rho));
  const ComplexVector& psi = target.vector();
  const ComplexVector v = rho.matrix() * psi;
  const double lambda_t = psi.dot(v).real();
  if ((v - lambda_t * psi).norm() > tau) {
    throw std::invalid_argument(
        "second_order_gain: target is not an eigenvector of rho; the second-order "
        "expression does not apply");
  }
  const Spectrum s = eig_hermitian(rho.matrix());
  const ComplexVector h_psi = h.matrix() * psi;
  const ComplexVector amplitudes = s.vectors.adjoint() * h_psi;
  double gain = 0.0;
  for (int j = 0; j < rho.dim(); ++j) {
    gain += (s.values(j) - lambda_t) * std::norm(amplitudes(j));
  }
  return gain;
}

}  // namespace qfb
