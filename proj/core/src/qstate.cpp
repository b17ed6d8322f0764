#include "qfb/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "trusted.hpp"

namespace qfb {
namespace {

constexpr double kZeroComponent = 1e-12;

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() < 1 || m.rows() > kMaxDim) {
    throw std::invalid_argument(std::string(what) +
                                ": expected a square matrix of dimension 1.." +
                                std::to_string(kMaxDim));
  }
  if (!m.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": non-finite entries");
  }
}

int first_nonzero(const ComplexVector& v) {
  for (int i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > kZeroComponent) return i;
  }
  return static_cast<int>(v.size());
}

// Rotates the global phase so the first nonzero component is real positive.
void fix_phase(ComplexVector& v) {
  const int i = first_nonzero(v);
  if (i == v.size()) return;
  v *= std::conj(v(i)) / std::abs(v(i));
}

Spectrum eig_unchecked(const ComplexMatrix& a) {
  const int n = static_cast<int>(a.rows());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(a, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw std::domain_error("eig_hermitian: eigensolver did not converge");
  }
  // Eigen returns ascending values.
  std::vector<ComplexVector> vecs(n);
  std::vector<double> vals(n);
  for (int j = 0; j < n; ++j) {
    vals[j] = solver.eigenvalues()(j);
    vecs[j] = solver.eigenvectors().col(j);
    fix_phase(vecs[j]);
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int l, int r) {
    if (std::abs(vals[l] - vals[r]) > tol::kEigen) return vals[l] > vals[r];
    const int fl = first_nonzero(vecs[l]);
    const int fr = first_nonzero(vecs[r]);
    if (fl != fr) return fl < fr;
    if (fl == n) return false;
    return std::abs(vecs[l](fl)) > std::abs(vecs[r](fr));
  });
  Spectrum s{RealVector(n), ComplexMatrix(n, n)};
  for (int j = 0; j < n; ++j) {
    s.values(j) = vals[order[j]];
    s.vectors.col(j) = vecs[order[j]];
  }
  return s;
}

ComplexMatrix hermitize(const ComplexMatrix& m) {
  return (m + m.adjoint()) * 0.5;
}

}  // namespace

// -- HermitianObservable ------------------------------------------------------

HermitianObservable::HermitianObservable(ComplexMatrix m) : mat_(std::move(m)) {
  require_square(mat_, "HermitianObservable");
  if (!is_hermitian(mat_)) {
    throw std::invalid_argument("HermitianObservable: matrix is not Hermitian");
  }
}

HermitianObservable HermitianObservable::hermitian_part(const ComplexMatrix& m) {
  require_square(m, "HermitianObservable");
  return HermitianObservable(hermitize(m), Trusted{});
}

HermitianObservable HermitianObservable::zero(int dim) {
  return HermitianObservable(ComplexMatrix::Zero(dim, dim), Trusted{});
}

// -- UnitaryOperator ----------------------------------------------------------

UnitaryOperator::UnitaryOperator(ComplexMatrix m) : mat_(std::move(m)) {
  require_square(mat_, "UnitaryOperator");
  const ComplexMatrix defect = mat_ * mat_.adjoint() - identity_matrix(dim());
  if (defect.cwiseAbs().maxCoeff() > tol::kUnitary) {
    throw std::invalid_argument("UnitaryOperator: matrix is not unitary");
  }
}

UnitaryOperator UnitaryOperator::identity(int dim) {
  return UnitaryOperator(identity_matrix(dim), Trusted{});
}

// -- PureState ------------------------------------------------------------------

PureState::PureState(ComplexVector v) : vec_(std::move(v)) {
  if (vec_.size() < 1 || vec_.size() > kMaxDim || !vec_.allFinite()) {
    throw std::invalid_argument("PureState: bad dimension or non-finite amplitude");
  }
  if (std::abs(vec_.norm() - 1.0) > tol::kTrace) {
    throw std::invalid_argument("PureState: vector is not normalized");
  }
}

PureState PureState::normalized(const ComplexVector& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw std::invalid_argument("PureState: cannot normalize a zero vector");
  }
  return PureState(v / n, Trusted{});
}

PureState PureState::basis(int dim, int index) {
  if (dim < 1 || dim > kMaxDim || index < 0 || index >= dim) {
    throw std::invalid_argument("PureState::basis: index out of range");
  }
  ComplexVector v = ComplexVector::Zero(dim);
  v(index) = 1.0;
  return PureState(std::move(v), Trusted{});
}

// -- DensityMatrix --------------------------------------------------------------

DensityMatrix::DensityMatrix(const ComplexMatrix& m) : mat_(m) {
  require_square(mat_, "DensityMatrix");
  if (!is_hermitian(mat_)) {
    throw std::invalid_argument("DensityMatrix: matrix is not Hermitian");
  }
  if (std::abs(mat_.trace() - Complex(1.0)) > tol::kTrace) {
    throw std::invalid_argument("DensityMatrix: trace differs from one");
  }
  const RealVector ev = eigenvalues_hermitian(mat_);
  if (ev(ev.size() - 1) < -tol::kPsd) {
    throw std::invalid_argument("DensityMatrix: matrix is not positive semidefinite");
  }
}

DensityMatrix DensityMatrix::pure(const PureState& psi) {
  return DensityMatrix(psi.projector(), Trusted{});
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw std::invalid_argument("DensityMatrix::maximally_mixed: bad dimension");
  }
  return DensityMatrix(identity_matrix(dim) / static_cast<double>(dim), Trusted{});
}

DensityMatrix DensityMatrix::diagonal(std::span<const double> probs) {
  const int n = static_cast<int>(probs.size());
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = probs[i];
  return DensityMatrix(m);
}

// -- projection ------------------------------------------------------------------

Projection project_to_state(const ComplexMatrix& m) {
  require_square(m, "project_to_state");
  const int n = static_cast<int>(m.rows());
  ComplexMatrix h = hermitize(m);

  if (n == 2) {
    // Closed form: eigenvalues mean +- radius.
    const double a = h(0, 0).real();
    const double d = h(1, 1).real();
    const double mean = 0.5 * (a + d);
    const double radius = std::hypot(0.5 * (a - d), std::abs(h(0, 1)));
    const double lo = mean - radius;
    const double hi = mean + radius;
    if (!(hi > 0.0)) {
      throw std::domain_error("project_to_state: no positive spectral weight");
    }
    if (lo >= 0.0) {
      h /= (a + d);
    } else {
      // Keep only the top eigenprojector: (h - lo I) / (hi - lo).
      h(0, 0) -= lo;
      h(1, 1) -= lo;
      h /= (hi - lo);
    }
    h(0, 0) = h(0, 0).real();
    h(1, 1) = h(1, 1).real();
    return {detail::TrustedFactory::state(std::move(h)), lo};
  }

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw std::domain_error("project_to_state: eigensolver did not converge");
  }
  RealVector ev = solver.eigenvalues();
  const double lo = ev(0);
  if (lo >= 0.0) {
    const double tr = h.trace().real();
    if (!(tr > 0.0)) throw std::domain_error("project_to_state: zero trace");
    h /= tr;
  } else {
    ev = ev.cwiseMax(0.0);
    const double tr = ev.sum();
    if (!(tr > 0.0)) {
      throw std::domain_error("project_to_state: no positive spectral weight");
    }
    const auto& v = solver.eigenvectors();
    h = v * (ev / tr).cast<Complex>().asDiagonal() * v.adjoint();
    h = hermitize(h);
  }
  for (int i = 0; i < n; ++i) h(i, i) = h(i, i).real();
  return {detail::TrustedFactory::state(std::move(h)), lo};
}

// -- spectra -----------------------------------------------------------------------

Spectrum eig_hermitian(const HermitianObservable& a) {
  return eig_unchecked(a.matrix());
}

Spectrum eig_hermitian(const ComplexMatrix& a) {
  require_square(a, "eig_hermitian");
  if (!is_hermitian(a)) {
    throw std::invalid_argument("eig_hermitian: matrix is not Hermitian");
  }
  return eig_unchecked(a);
}

RealVector eigenvalues_hermitian(const ComplexMatrix& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitize(a), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::domain_error("eigenvalues_hermitian: eigensolver did not converge");
  }
  return solver.eigenvalues().reverse();
}

UnitaryOperator expm_skew(const HermitianObservable& h, double t) {
  if (!std::isfinite(t)) throw std::invalid_argument("expm_skew: non-finite time");
  const Spectrum s = eig_hermitian(h);
  const int n = h.dim();
  ComplexVector phases(n);
  for (int j = 0; j < n; ++j) phases(j) = std::polar(1.0, -s.values(j) * t);
  ComplexMatrix u = s.vectors * phases.asDiagonal() * s.vectors.adjoint();
  return detail::TrustedFactory::unitary(std::move(u));
}

// -- state functionals ---------------------------------------------------------------

double purity(const DensityMatrix& rho) {
  return rho.matrix().squaredNorm();
}

double von_neumann_entropy(const DensityMatrix& rho) {
  const RealVector ev = eigenvalues_hermitian(rho.matrix());
  double s = 0.0;
  for (int i = 0; i < ev.size(); ++i) {
    if (ev(i) > 0.0) s -= ev(i) * std::log(ev(i));
  }
  return s;
}

double overlap(const DensityMatrix& rho, const PureState& psi) {
  if (rho.dim() != psi.dim()) {
    throw std::invalid_argument("overlap: dimension mismatch");
  }
  const ComplexVector& v = psi.vector();
  return v.dot(rho.matrix() * v).real();
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) {
    throw std::invalid_argument("trace_distance: dimension mismatch");
  }
  const RealVector ev = eigenvalues_hermitian(rho.matrix() - sigma.matrix());
  return 0.5 * ev.cwiseAbs().sum();
}

bool majorizes(std::span<const double> lambda, std::span<const double> mu,
               double slack) {
  if (lambda.size() != mu.size()) {
    throw std::invalid_argument("majorizes: vectors differ in length");
  }
  const auto total = [](std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0);
  };
  if (std::abs(total(lambda) - 1.0) > tol::kTrace || std::abs(total(mu) - 1.0) > tol::kTrace) {
    throw std::invalid_argument("majorizes: vectors must sum to one");
  }
  std::vector<double> l(lambda.begin(), lambda.end());
  std::vector<double> m(mu.begin(), mu.end());
  std::sort(l.begin(), l.end(), std::greater<>());
  std::sort(m.begin(), m.end(), std::greater<>());
  double sl = 0.0;
  double sm = 0.0;
  for (std::size_t i = 0; i < l.size(); ++i) {
    sl += l[i];
    sm += m[i];
    if (sl < sm - slack) return false;
  }
  return true;
}

// -- helpers ----------------------------------------------------------------------------

ComplexMatrix identity_matrix(int dim) { return ComplexMatrix::Identity(dim, dim); }

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a * b - b * a;
}

bool is_hermitian(const ComplexMatrix& m, double tolerance) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tolerance;
}

double frobenius_norm(const ComplexMatrix& m) { return m.norm(); }

HermitianObservable pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return detail::TrustedFactory::hermitian(std::move(m));
}

HermitianObservable pauli_y() {
  const Complex i(0.0, 1.0);
  ComplexMatrix m(2, 2);
  m << 0.0, -i, i, 0.0;
  return detail::TrustedFactory::hermitian(std::move(m));
}

HermitianObservable pauli_z() {
  ComplexMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return detail::TrustedFactory::hermitian(std::move(m));
}

Eigen::Vector3d bloch_vector(const DensityMatrix& rho) {
  if (rho.dim() != 2) throw std::invalid_argument("bloch_vector: qubit state required");
  const ComplexMatrix& m = rho.matrix();
  return {2.0 * m(0, 1).real(), -2.0 * m(0, 1).imag(), (m(0, 0) - m(1, 1)).real()};
}

HermitianObservable spin_along(const Eigen::Vector3d& n) {
  const Complex i(0.0, 1.0);
  ComplexMatrix m(2, 2);
  m << n.z(), n.x() - i * n.y(), n.x() + i * n.y(), -n.z();
  return detail::TrustedFactory::hermitian(std::move(m));
}

}  // namespace qfb
