#pragma once

// Strength, information and disturbance of measurements.

#include <cstdint>
#include <span>
#include <vector>

#include "qfb/povm.hpp"
#include "qfb/qstate.hpp"

namespace qfb {

/// Measurement strength; either a finite non-negative value or the
/// distinguished infinite strength of measurements containing a rank-one
/// operator.
class Strength {
 public:
  static Strength finite(double value);
  static Strength infinite() { return Strength(0.0, true); }

  bool is_infinite() const { return infinite_; }
  /// Throws std::logic_error when infinite.
  double value() const;

  friend bool operator==(const Strength&, const Strength&) = default;

 private:
  Strength(double v, bool inf) : value_(v), infinite_(inf) {}
  double value_;
  bool infinite_;
};

struct StrengthReport {
  double u_v;  // nats
  double u_p;
  Strength s_v;
  Strength s_p;
};

struct DisturbanceReport {
  double n_e_v;  // S(rho_f) - S(rho), nats
  double n_e_p;  // Tr[rho^2] - Tr[rho_f^2]
  double i_f_p;  // average post-measurement purity
};

/// Probability-weighted average entropy of the post-measurement states.
/// Outcomes with probability below tol::kProbability contribute zero.
double uncertainty_v(const MeasurementOperatorSet& set, const DensityMatrix& rho);

/// 1 - sum_n Tr[(Omega_n rho Omega_n^dagger)^2] / Tr[Omega_n rho Omega_n^dagger].
double uncertainty_p(const MeasurementOperatorSet& set, const DensityMatrix& rho);

/// Strengths s_v = 1/u_v(I/N) - 1/ln N and s_p = 1/u_p(I/N) - N/(N-1).
/// Any set with a rank-one operator, or with zero uncertainty at I/N, has
/// infinite strength. Requires N >= 2.
StrengthReport strength(const MeasurementOperatorSet& set);

/// Number of singular values above 1e-9 times the largest.
int numerical_rank(const ComplexMatrix& m);

DisturbanceReport disturbance(const MeasurementOperatorSet& set, const DensityMatrix& rho);

struct ThetaSweepRow {
  double theta;
  double i_f_p;
  double n_e_p;
  double n_e_v;
};

/// Disturbance of the kappa measurement rotated by (theta, phi) acting on
/// diag(p, 1 - p), for each theta.
std::vector<ThetaSweepRow> theta_sweep(double p, double kappa, std::span<const double> thetas,
                                       double phi = 0.0);

/// n points evenly spaced on [a, b], endpoints included.
std::vector<double> linspace(double a, double b, int n);

/// Checks <psi|rho_f|psi> <= lambda_max(rho) + 1e-12 where rho_f is the
/// non-selective post-measurement state. Throws std::invalid_argument for sets
/// that are not pure measurements.
bool fidelity_bound_check(const MeasurementOperatorSet& set, const DensityMatrix& rho,
                          const PureState& target);

// -- continuous-measurement strength rates -----------------------------------------

struct RateOptions {
  int realizations = 20000;
  double horizon = 1e-4;  // short simulation horizon T
  int steps = 10;         // Euler-Maruyama steps across the horizon
  std::uint64_t seed = 1;
  int threads = 0;        // <= 0: all hardware threads
};

struct StrengthRate {
  double rate_v;
  double rate_v_se;
  double rate_p;
  double rate_p_se;
};

/// Finite-difference estimate of d s_v/dt and d s_p/dt at rho = I/N under
/// continuous measurement of Q with constant k, from an ensemble of
/// short-horizon trajectories. k = 0 returns zeros.
StrengthRate strength_rate_numeric(const HermitianObservable& q, double k,
                                   const RateOptions& options = {});

struct ClosedFormRates {
  double rate_v;
  double rate_p;
};

/// The published closed forms
///   d s_v/dt = 4k / (N ln^2 N) (Tr[Q^2] + 3 Tr[Q]^2)
///   d s_p/dt = 8k N^2 / (N-1)^2 Tr[Q^2]
/// kept as comparison targets for strength_rate_numeric.
ClosedFormRates published_strength_rates(const HermitianObservable& q, double k);

}  // namespace qfb
