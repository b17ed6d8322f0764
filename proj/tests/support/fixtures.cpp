#include "fixtures.hpp"

#include <algorithm>
#include <cmath>

namespace qfb::testing {

ComplexMatrix ginibre(int n, Rng& rng) {
  std::normal_distribution<double> g;
  ComplexMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

HermitianObservable random_hermitian(int n, Rng& rng) {
  return HermitianObservable::hermitian_part(ginibre(n, rng));
}

ComplexMatrix haar_unitary(int n, Rng& rng) {
  Eigen::HouseholderQR<ComplexMatrix> qr(ginibre(n, rng));
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) q.col(j) *= r(j, j) / std::abs(r(j, j));
  return q;
}

PureState random_pure(int n, Rng& rng) {
  return PureState::normalized(ginibre(n, rng).col(0));
}

DensityMatrix random_density(int n, Rng& rng) {
  const ComplexMatrix g = ginibre(n, rng);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix((rho + rho.adjoint()) / 2.0);
}

namespace {

ComplexMatrix psd_power(const ComplexMatrix& m, double power) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m);
  RealVector ev = es.eigenvalues();
  for (int i = 0; i < ev.size(); ++i) ev(i) = ev(i) > 0.0 ? std::pow(ev(i), power) : 0.0;
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

std::vector<ComplexMatrix> random_pure_povm(int n, int outcomes, Rng& rng) {
  std::vector<ComplexMatrix> b;
  ComplexMatrix s = ComplexMatrix::Zero(n, n);
  for (int j = 0; j < outcomes; ++j) {
    const ComplexMatrix g = ginibre(n, rng);
    b.push_back(g * g.adjoint());
    s += b.back();
  }
  const ComplexMatrix s_inv_half = psd_power(s, -0.5);
  std::vector<ComplexMatrix> ops;
  for (const ComplexMatrix& bj : b) {
    ComplexMatrix e = s_inv_half * bj * s_inv_half;
    ops.push_back(psd_power((e + e.adjoint()) / 2.0, 0.5));
  }
  return ops;
}

std::vector<ComplexMatrix> random_general_povm(int n, int outcomes, Rng& rng) {
  std::vector<ComplexMatrix> ops = random_pure_povm(n, outcomes, rng);
  for (ComplexMatrix& op : ops) op = haar_unitary(n, rng) * op;
  return ops;
}

ComplexMatrix random_hamiltonian(int n, double mu, Rng& rng) {
  ComplexMatrix h = random_hermitian(n, rng).matrix();
  return h * std::sqrt(mu / h.squaredNorm());
}

ComplexMatrix expm_series(const ComplexMatrix& a) {
  const int n = static_cast<int>(a.rows());
  int squarings = 0;
  double norm = a.norm();
  while (norm > 0.5) {
    norm /= 2.0;
    ++squarings;
  }
  const ComplexMatrix x = a / std::pow(2.0, squarings);
  ComplexMatrix term = ComplexMatrix::Identity(n, n);
  ComplexMatrix sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * x / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

std::vector<double> eigenvalues_desc(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
  std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + m.rows());
  std::sort(v.rbegin(), v.rend());
  return v;
}

ComplexMatrix sqrtm_psd(const ComplexMatrix& m) { return psd_power(m, 0.5); }

}  // namespace qfb::testing
