#pragma once

// Dense complex linear algebra and quantum-state primitives for small
// Hilbert spaces (dimension 1..kMaxDim).

#include <complex>
#include <span>
#include <utility>

#include <Eigen/Dense>

namespace qfb {

namespace detail {
struct TrustedFactory;
}  // namespace detail

using Complex = std::complex<double>;

/// Largest supported Hilbert-space dimension. Matrices use inline storage of
/// this size, so no heap allocation happens in the integration loops.
inline constexpr int kMaxDim = 16;

using ComplexMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic,
                                    Eigen::ColMajor, kMaxDim, kMaxDim>;
using ComplexVector =
    Eigen::Matrix<Complex, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using RealVector =
    Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

namespace tol {
inline constexpr double kHermitian = 1e-9;
inline constexpr double kTrace = 1e-9;
inline constexpr double kPsd = 1e-9;
inline constexpr double kUnitary = 1e-8;
inline constexpr double kEigen = 1e-8;
}  // namespace tol

class HermitianObservable {
 public:
  /// Throws std::invalid_argument unless m is square, finite and Hermitian
  /// within tol::kHermitian.
  explicit HermitianObservable(ComplexMatrix m);

  /// (m + m^dagger) / 2, no tolerance check.
  static HermitianObservable hermitian_part(const ComplexMatrix& m);
  static HermitianObservable zero(int dim);

  const ComplexMatrix& matrix() const { return mat_; }
  int dim() const { return static_cast<int>(mat_.rows()); }

 private:
  friend struct detail::TrustedFactory;
  struct Trusted {};
  HermitianObservable(ComplexMatrix m, Trusted) : mat_(std::move(m)) {}
  ComplexMatrix mat_;
};

class UnitaryOperator {
 public:
  /// Throws std::invalid_argument unless m m^dagger = I within tol::kUnitary.
  explicit UnitaryOperator(ComplexMatrix m);
  static UnitaryOperator identity(int dim);

  const ComplexMatrix& matrix() const { return mat_; }
  int dim() const { return static_cast<int>(mat_.rows()); }

 private:
  friend struct detail::TrustedFactory;
  struct Trusted {};
  UnitaryOperator(ComplexMatrix m, Trusted) : mat_(std::move(m)) {}
  ComplexMatrix mat_;
};

class PureState {
 public:
  /// Throws std::invalid_argument unless the vector has unit norm within
  /// tol::kTrace.
  explicit PureState(ComplexVector v);
  /// Rescales v to unit norm; throws on a zero vector.
  static PureState normalized(const ComplexVector& v);
  static PureState basis(int dim, int index);

  const ComplexVector& vector() const { return vec_; }
  int dim() const { return static_cast<int>(vec_.size()); }
  ComplexMatrix projector() const { return vec_ * vec_.adjoint(); }

 private:
  friend struct detail::TrustedFactory;
  struct Trusted {};
  PureState(ComplexVector v, Trusted) : vec_(std::move(v)) {}
  ComplexVector vec_;
};

class DensityMatrix {
 public:
  /// Throws std::invalid_argument unless m is Hermitian (tol::kHermitian),
  /// has unit trace (tol::kTrace) and no eigenvalue below -tol::kPsd.
  explicit DensityMatrix(const ComplexMatrix& m);

  static DensityMatrix pure(const PureState& psi);
  static DensityMatrix maximally_mixed(int dim);
  /// diag(probs); the probabilities must form a distribution.
  static DensityMatrix diagonal(std::span<const double> probs);

  const ComplexMatrix& matrix() const { return mat_; }
  int dim() const { return static_cast<int>(mat_.rows()); }

 private:
  friend struct detail::TrustedFactory;
  struct Trusted {};
  DensityMatrix(ComplexMatrix m, Trusted) : mat_(std::move(m)) {}
  ComplexMatrix mat_;
};

struct Projection {
  DensityMatrix state;
  /// Smallest eigenvalue of the Hermitian part, before clipping and
  /// renormalization.
  double min_eigenvalue;
};

/// Maps an approximately physical matrix back onto the state manifold:
/// Hermitize, clip negative eigenvalues at zero, renormalize the trace.
/// Throws std::domain_error if the matrix is non-finite or has no positive
/// spectral weight.
Projection project_to_state(const ComplexMatrix& m);

/// Eigenvalues sorted descending with orthonormal eigenvector columns.
/// Each eigenvector is phase-fixed so its first nonzero component is real and
/// positive. Eigenvalues within tol::kEigen of each other are ordered by the
/// index of the eigenvector's first nonzero component, then by that
/// component's magnitude (larger first).
struct Spectrum {
  RealVector values;
  ComplexMatrix vectors;
};

Spectrum eig_hermitian(const HermitianObservable& a);
/// Same as above for a raw matrix; throws std::invalid_argument if it is not
/// Hermitian within tol::kHermitian.
Spectrum eig_hermitian(const ComplexMatrix& a);
/// Eigenvalues of the Hermitian part only, descending.
RealVector eigenvalues_hermitian(const ComplexMatrix& a);

/// exp(-i H t).
UnitaryOperator expm_skew(const HermitianObservable& h, double t);

double purity(const DensityMatrix& rho);
/// Natural-log entropy with 0 ln 0 = 0.
double von_neumann_entropy(const DensityMatrix& rho);
/// <psi|rho|psi>.
double overlap(const DensityMatrix& rho, const PureState& psi);
/// (1/2) Tr|rho - sigma|.
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

/// True iff lambda majorizes mu: every descending partial sum of lambda is at
/// least the matching partial sum of mu, up to `slack`. Both vectors must sum
/// to one within tol::kTrace and have equal length.
bool majorizes(std::span<const double> lambda, std::span<const double> mu,
               double slack = 1e-12);

ComplexMatrix identity_matrix(int dim);
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);
bool is_hermitian(const ComplexMatrix& m, double tolerance = tol::kHermitian);
double frobenius_norm(const ComplexMatrix& m);

HermitianObservable pauli_x();
HermitianObservable pauli_y();
HermitianObservable pauli_z();

/// (I + r.sigma) / 2 components of a qubit state.
Eigen::Vector3d bloch_vector(const DensityMatrix& rho);
/// n.sigma for a unit vector n.
HermitianObservable spin_along(const Eigen::Vector3d& n);

}  // namespace qfb
