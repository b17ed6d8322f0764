#pragma once

// Monte Carlo ensembles of controlled trajectories and the measurement-angle
// experiment built on them.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qfb/feedback.hpp"
#include "qfb/qstate.hpp"
#include "qfb/sde.hpp"

namespace qfb {

/// Trajectories are reduced in fixed blocks of this many consecutive indices,
/// so the floating-point summation order never depends on the thread count.
inline constexpr int kReductionBlock = 32;

struct EnsembleConfig {
  int realizations = 1;
  std::uint64_t master_seed = 0;
  SmeConfig sme;
  MeasurementPolicy policy;
  FeedbackStrength mu{0.0};
  TargetFn target;
  int stat_stride = 10;         // statistics every stat_stride integration steps
  int threads = 0;              // <= 0: all hardware threads
  std::uint64_t stream_tag = 0; // third component of the per-trajectory stream key
  double transient_cutoff = 0.0;  // time averages use grid points with t >= cutoff

  void validate() const;
};

/// Mean with standard error sample_stddev / sqrt(R); no error for R = 1.
struct Estimate {
  double mean = 0.0;
  std::optional<double> se;
};

struct EnsembleStats {
  int realizations = 0;
  std::vector<double> times;
  std::vector<Estimate> purity;
  std::vector<Estimate> overlap;
  /// Entrywise mean of rho at each time; rho_se holds the standard errors of
  /// the real parts in its real part and of the imaginary parts in its
  /// imaginary part. rho_se is empty for R = 1.
  std::vector<ComplexMatrix> rho_mean;
  std::vector<ComplexMatrix> rho_se;
  /// Per-trajectory averages over the stat grid, then averaged over the
  /// ensemble.
  Estimate time_avg_purity;
  Estimate time_avg_overlap;
};

/// Runs R trajectories with streams derive_stream_key(master_seed, index,
/// stream_tag). Output is bit-identical for any thread count. A step
/// rejection aborts the run with a NumericalFailure naming the trajectory and
/// its stream key.
EnsembleStats run_ensemble(const EnsembleConfig& cfg);

struct ThetaRow {
  double theta;
  Estimate purity;   // time-averaged
  Estimate overlap;  // time-averaged
};

/// One ensemble per angle in relative_angle mode (phi taken from
/// base.policy), the i-th angle using stream tag i.
std::vector<ThetaRow> theta_experiment(const EnsembleConfig& base,
                                       std::span<const double> thetas);

}  // namespace qfb
