#include "qfb/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace qfb {
namespace {

constexpr double kZeroUncertainty = 1e-14;

// Entropy of the normalized Hermitian PSD matrix m / tr.
double entropy_of(const ComplexMatrix& m, double tr) {
  const RealVector ev = eigenvalues_hermitian(m / tr);
  double s = 0.0;
  for (int i = 0; i < ev.size(); ++i) {
    if (ev(i) > 0.0) s -= ev(i) * std::log(ev(i));
  }
  return s;
}

Strength strength_from(double u, double offset) {
  if (u <= kZeroUncertainty) return Strength::infinite();
  const double s = 1.0 / u - offset;
  // Rounding can leave the maximal-uncertainty case a few ulps below zero.
  return Strength::finite(s < 0.0 && s > -1e-12 ? 0.0 : s);
}

}  // namespace

Strength Strength::finite(double value) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument("Strength: value must be finite and non-negative");
  }
  return Strength(value, false);
}

double Strength::value() const {
  if (infinite_) throw std::logic_error("Strength: value() on an infinite strength");
  return value_;
}

double uncertainty_v(const MeasurementOperatorSet& set, const DensityMatrix& rho) {
  if (rho.dim() != set.dim()) throw std::invalid_argument("uncertainty_v: dimension mismatch");
  double u = 0.0;
  for (const auto& op : set.operators()) {
    const ComplexMatrix m = op * rho.matrix() * op.adjoint();
    const double p = m.trace().real();
    if (p < tol::kProbability) continue;
    u += p * entropy_of(m, p);
  }
  return u;
}

double uncertainty_p(const MeasurementOperatorSet& set, const DensityMatrix& rho) {
  if (rho.dim() != set.dim()) throw std::invalid_argument("uncertainty_p: dimension mismatch");
  double avg_purity = 0.0;
  for (const auto& op : set.operators()) {
    const ComplexMatrix m = op * rho.matrix() * op.adjoint();
    const double p = m.trace().real();
    if (p < tol::kProbability) continue;
    avg_purity += m.squaredNorm() / p;
  }
  return 1.0 - avg_purity;
}

int numerical_rank(const ComplexMatrix& m) {
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  const RealVector sv = svd.singularValues();
  if (sv.size() == 0 || !(sv(0) > 0.0)) return 0;
  int r = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > 1e-9 * sv(0)) ++r;
  }
  return r;
}

StrengthReport strength(const MeasurementOperatorSet& set) {
  const int n = set.dim();
  if (n < 2) throw std::invalid_argument("strength: requires dimension >= 2");
  const DensityMatrix mixed = DensityMatrix::maximally_mixed(n);
  const double uv = uncertainty_v(set, mixed);
  const double up = uncertainty_p(set, mixed);

  bool has_rank_one = false;
  for (const auto& op : set.operators()) {
    if (numerical_rank(op) == 1) {
      has_rank_one = true;
      break;
    }
  }
  if (has_rank_one) return {uv, up, Strength::infinite(), Strength::infinite()};
  return {uv, up, strength_from(uv, 1.0 / std::log(static_cast<double>(n))),
          strength_from(up, static_cast<double>(n) / (n - 1))};
}

DisturbanceReport disturbance(const MeasurementOperatorSet& set, const DensityMatrix& rho) {
  const DensityMatrix rho_f = nonselective_apply(set, rho);
  return {von_neumann_entropy(rho_f) - von_neumann_entropy(rho), purity(rho) - purity(rho_f),
          1.0 - uncertainty_p(set, rho)};
}

std::vector<ThetaSweepRow> theta_sweep(double p, double kappa, std::span<const double> thetas,
                                       double phi) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("theta_sweep: p must lie in (0, 1)");
  const double probs[] = {p, 1.0 - p};
  const DensityMatrix rho = DensityMatrix::diagonal(probs);
  std::vector<ThetaSweepRow> rows;
  rows.reserve(thetas.size());
  for (double theta : thetas) {
    if (!(theta >= 0.0 && theta <= M_PI + 1e-12)) {
      throw std::invalid_argument("theta_sweep: theta must lie in [0, pi]");
    }
    const DisturbanceReport d = disturbance(kappa_povm({kappa, theta, phi}), rho);
    rows.push_back({theta, d.i_f_p, d.n_e_p, d.n_e_v});
  }
  return rows;
}

std::vector<double> linspace(double a, double b, int n) {
  if (n < 1) throw std::invalid_argument("linspace: need at least one point");
  if (n == 1) return {a};
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  v.back() = b;
  return v;
}

bool fidelity_bound_check(const MeasurementOperatorSet& set, const DensityMatrix& rho,
                          const PureState& target) {
  if (set.kind() == MeasurementKind::general) {
    throw std::invalid_argument("fidelity_bound_check: bound holds only for pure measurements");
  }
  const double lambda_max = eigenvalues_hermitian(rho.matrix())(0);
  return overlap(nonselective_apply(set, rho), target) <= lambda_max + 1e-12;
}

ClosedFormRates published_strength_rates(const HermitianObservable& q, double k) {
  const double n = q.dim();
  if (n < 2) throw std::invalid_argument("published_strength_rates: requires dimension >= 2");
  const double tr_q = q.matrix().trace().real();
  const double tr_q2 = q.matrix().squaredNorm();
  const double ln_n = std::log(n);
  return {4.0 * k / (n * ln_n * ln_n) * (tr_q2 + 3.0 * tr_q * tr_q),
          8.0 * k * n * n / ((n - 1.0) * (n - 1.0)) * tr_q2};
}

}  // namespace qfb
