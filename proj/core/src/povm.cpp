#include "qfb/povm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "trusted.hpp"

namespace qfb {
namespace {

bool is_psd(const ComplexMatrix& m) {
  return is_hermitian(m, tol::kHermitian) &&
         eigenvalues_hermitian(m)(m.rows() - 1) >= -tol::kPsd;
}

MeasurementKind classify(std::span<const ComplexMatrix> ops) {
  bool pure = true;
  bool projective = true;
  for (const auto& op : ops) {
    if (!is_psd(op)) {
      pure = false;
      break;
    }
    if ((op * op - op).cwiseAbs().maxCoeff() > tol::kPsd) projective = false;
  }
  if (!pure) return MeasurementKind::general;
  return projective ? MeasurementKind::projective : MeasurementKind::pure;
}

double spectral_radius(const HermitianObservable& q) {
  return eigenvalues_hermitian(q.matrix()).cwiseAbs().maxCoeff();
}

// Omega rho Omega^dagger.
ComplexMatrix conjugate(const ComplexMatrix& omega, const ComplexMatrix& rho) {
  return omega * rho * omega.adjoint();
}

}  // namespace

double completeness_residual(std::span<const ComplexMatrix> ops) {
  if (ops.empty()) return std::numeric_limits<double>::infinity();
  const int n = static_cast<int>(ops.front().rows());
  ComplexMatrix sum = ComplexMatrix::Zero(n, n);
  for (const auto& op : ops) sum.noalias() += op.adjoint() * op;
  return (sum - identity_matrix(n)).cwiseAbs().maxCoeff();
}

MeasurementOperatorSet::MeasurementOperatorSet(std::vector<ComplexMatrix> ops,
                                               double completeness_tolerance)
    : ops_(std::move(ops)) {
  if (ops_.empty()) throw std::invalid_argument("MeasurementOperatorSet: no operators");
  const auto n = ops_.front().rows();
  for (const auto& op : ops_) {
    if (op.rows() != n || op.cols() != n || n < 1 || n > kMaxDim || !op.allFinite()) {
      throw std::invalid_argument(
          "MeasurementOperatorSet: operators must be finite, square and of equal dimension");
    }
  }
  residual_ = qfb::completeness_residual(ops_);
  if (!(residual_ <= completeness_tolerance)) {
    throw std::invalid_argument("MeasurementOperatorSet: completeness residual " +
                                std::to_string(residual_) + " exceeds tolerance " +
                                std::to_string(completeness_tolerance));
  }
  kind_ = classify(ops_);
}

std::vector<double> MeasurementOperatorSet::probabilities(const DensityMatrix& rho) const {
  if (rho.dim() != dim()) {
    throw std::invalid_argument("probabilities: dimension mismatch");
  }
  std::vector<double> p(ops_.size());
  for (std::size_t i = 0; i < ops_.size(); ++i) {
    p[i] = std::max(0.0, conjugate(ops_[i], rho.matrix()).trace().real());
  }
  return p;
}

// -- constructions ---------------------------------------------------------------

MeasurementOperatorSet gaussian_weak_povm(const HermitianObservable& q, double k, double dt,
                                          std::span<const double> alpha_grid) {
  if (!(k > 0.0) || !(dt > 0.0)) {
    throw std::invalid_argument("gaussian_weak_povm: k and dt must be positive");
  }
  if (alpha_grid.size() < 2) {
    throw std::invalid_argument("gaussian_weak_povm: grid needs at least two points");
  }
  const double step = alpha_grid[1] - alpha_grid[0];
  if (!(step > 0.0)) throw std::invalid_argument("gaussian_weak_povm: grid must increase");
  for (std::size_t i = 1; i < alpha_grid.size(); ++i) {
    const double d = alpha_grid[i] - alpha_grid[i - 1];
    if (std::abs(d - step) > 1e-9 * step) {
      throw std::invalid_argument("gaussian_weak_povm: grid must be uniformly spaced");
    }
  }

  const Spectrum s = eig_hermitian(q);
  const int n = q.dim();
  const double kdt = k * dt;

  // Per-eigenvalue grid sums of exp(-2 k dt (q_i - alpha)^2) * step.
  RealVector sums = RealVector::Zero(n);
  for (double a : alpha_grid) {
    for (int i = 0; i < n; ++i) {
      const double x = s.values(i) - a;
      sums(i) += std::exp(-2.0 * kdt * x * x) * step;
    }
  }
  const double lo = sums.minCoeff();
  const double hi = sums.maxCoeff();
  if (!(lo > 0.0)) {
    throw std::invalid_argument("gaussian_weak_povm: grid misses the spectrum of Q entirely");
  }
  const double c2 = 2.0 / (lo + hi);
  const double residual = std::max(std::abs(c2 * lo - 1.0), std::abs(c2 * hi - 1.0));
  if (residual > tol::kPovm) {
    throw std::invalid_argument(
        "gaussian_weak_povm: grid too coarse or too narrow for completeness (residual " +
        std::to_string(residual) + "); widen or refine the alpha grid");
  }

  const double scale = std::sqrt(c2 * step);
  std::vector<ComplexMatrix> ops;
  ops.reserve(alpha_grid.size());
  for (double a : alpha_grid) {
    RealVector w(n);
    for (int i = 0; i < n; ++i) {
      const double x = s.values(i) - a;
      w(i) = scale * std::exp(-kdt * x * x);
    }
    ops.push_back(s.vectors * w.cast<Complex>().asDiagonal() * s.vectors.adjoint());
  }
  return MeasurementOperatorSet(std::move(ops));
}

std::vector<double> default_alpha_grid(const HermitianObservable& q, double k, double dt,
                                       const DensityMatrix& rho, int points) {
  if (!(k > 0.0) || !(dt > 0.0) || points < 2) {
    throw std::invalid_argument("default_alpha_grid: bad parameters");
  }
  const double centre = (q.matrix() * rho.matrix()).trace().real();
  const double half = 6.0 / std::sqrt(2.0 * k * dt) + spectral_radius(q);
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) {
    grid[i] = centre - half + 2.0 * half * i / (points - 1);
  }
  return grid;
}

MeasurementOperatorSet poisson_povm(const HermitianObservable& q, double k, double dt) {
  if (!(k > 0.0) || !(dt > 0.0)) {
    throw std::invalid_argument("poisson_povm: k and dt must be positive");
  }
  const int n = q.dim();
  const double kdt = k * dt;
  const ComplexMatrix q2 = q.matrix() * q.matrix();
  ComplexMatrix omega0 = identity_matrix(n) - 0.5 * kdt * q2;
  if (eigenvalues_hermitian(omega0)(n - 1) < -tol::kPsd) {
    throw std::invalid_argument("poisson_povm: k*dt too large, Omega_0 is not positive");
  }
  ComplexMatrix omega1 = std::sqrt(kdt) * q.matrix();
  // sum Omega^dagger Omega - I = (k dt)^2 Q^4 / 4 exactly.
  const double r = spectral_radius(q);
  const double bound = 0.25 * kdt * kdt * r * r * r * r;
  return MeasurementOperatorSet({std::move(omega0), std::move(omega1)},
                                tol::kPovm + bound * (1.0 + 1e-9));
}

UnitaryOperator bloch_rotation(double theta, double phi) {
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  ComplexMatrix u(2, 2);
  u(0, 0) = c;
  const Complex phase = std::polar(1.0, phi);
  u(1, 0) = s * phase;
  u(0, 1) = -s * std::conj(phase);
  u(1, 1) = c;
  return UnitaryOperator(std::move(u));
}

MeasurementOperatorSet kappa_povm(const KappaMeasurement& m) {
  if (!(m.kappa >= 0.0 && m.kappa <= 1.0)) {
    throw std::invalid_argument("kappa_povm: kappa must lie in [0, 1]");
  }
  if (!(m.theta >= 0.0 && m.theta <= M_PI)) {
    throw std::invalid_argument("kappa_povm: theta must lie in [0, pi]");
  }
  if (!(m.phi >= 0.0 && m.phi < 2.0 * M_PI)) {
    throw std::invalid_argument("kappa_povm: phi must lie in [0, 2 pi)");
  }
  const double a = std::sqrt(m.kappa);
  const double b = std::sqrt(1.0 - m.kappa);
  ComplexMatrix omega0 = ComplexMatrix::Zero(2, 2);
  ComplexMatrix omega1 = ComplexMatrix::Zero(2, 2);
  omega0(0, 0) = a;
  omega0(1, 1) = b;
  omega1(0, 0) = b;
  omega1(1, 1) = a;
  if (m.theta != 0.0) {
    const ComplexMatrix u = bloch_rotation(m.theta, m.phi).matrix();
    omega0 = u * omega0 * u.adjoint();
    omega1 = u * omega1 * u.adjoint();
  }
  return MeasurementOperatorSet({std::move(omega0), std::move(omega1)});
}

// -- application ------------------------------------------------------------------

MeasurementOutcome apply_outcome(const MeasurementOperatorSet& set, const DensityMatrix& rho,
                                 std::size_t n) {
  if (rho.dim() != set.dim()) throw std::invalid_argument("apply_outcome: dimension mismatch");
  if (n >= set.size()) throw std::out_of_range("apply_outcome: outcome index out of range");
  const ComplexMatrix unnormalized = conjugate(set.op(n), rho.matrix());
  const double p = unnormalized.trace().real();
  if (!(p > tol::kProbability)) {
    throw std::domain_error("apply_outcome: outcome " + std::to_string(n) +
                            " has zero probability");
  }
  return {n, p, project_to_state(unnormalized / p).state};
}

MeasurementOutcome sample_outcome(const MeasurementOperatorSet& set, const DensityMatrix& rho,
                                  RngStream& stream) {
  const std::vector<double> p = set.probabilities(rho);
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  const double u = stream.uniform() * total;
  double acc = 0.0;
  std::size_t chosen = p.size();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= tol::kProbability) continue;
    chosen = i;
    acc += p[i];
    if (u < acc) break;
  }
  if (chosen == p.size()) {
    throw std::domain_error("sample_outcome: no outcome has positive probability");
  }
  return apply_outcome(set, rho, chosen);
}

DensityMatrix nonselective_apply(const MeasurementOperatorSet& set, const DensityMatrix& rho) {
  if (rho.dim() != set.dim()) {
    throw std::invalid_argument("nonselective_apply: dimension mismatch");
  }
  const int n = rho.dim();
  ComplexMatrix sum = ComplexMatrix::Zero(n, n);
  for (const auto& op : set.operators()) sum.noalias() += conjugate(op, rho.matrix());
  return project_to_state(sum).state;
}

// -- polar decomposition --------------------------------------------------------------

PolarDecomposition polar_split(const ComplexMatrix& omega) {
  if (omega.rows() != omega.cols() || omega.rows() < 1 || !omega.allFinite()) {
    throw std::invalid_argument("polar_split: expected a finite square matrix");
  }
  const int n = static_cast<int>(omega.rows());
  Eigen::JacobiSVD<ComplexMatrix> svd(omega, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector sv = svd.singularValues();
  const ComplexMatrix& w = svd.matrixU();
  const ComplexMatrix& v = svd.matrixV();
  const double cutoff = 1e-12 * std::max(1.0, sv(0));
  int rank = 0;
  while (rank < n && sv(rank) > cutoff) ++rank;

  ComplexMatrix u = w.leftCols(rank) * v.leftCols(rank).adjoint();
  if (rank < n) {
    const int k = n - rank;
    const ComplexMatrix wk = w.rightCols(k);
    const ComplexMatrix vk = v.rightCols(k);
    const ComplexMatrix m = wk.adjoint() * vk;
    Eigen::JacobiSVD<ComplexMatrix> inner(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const ComplexMatrix r = inner.matrixU() * inner.matrixV().adjoint();
    u += wk * r * vk.adjoint();
  }
  ComplexMatrix p = v * sv.cast<Complex>().asDiagonal() * v.adjoint();
  p = (p + p.adjoint()) * 0.5;
  return {detail::TrustedFactory::unitary(std::move(u)), std::move(p)};
}

}  // namespace qfb
