#pragma once

// Time evolution under continuous measurement: the selective stochastic
// master equation, its non-selective average, closed-loop feedback control
// trajectories and the inverse-Zeno measurement sequencer.

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qfb/feedback.hpp"
#include "qfb/qstate.hpp"
#include "qfb/rng.hpp"

namespace qfb {

/// A step or run produced a state that cannot be mapped back to a physical
/// one (usually dt too large).
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Largest eigenvalue deficit an Euler-Maruyama step may produce before the
/// step is rejected instead of projected.
inline constexpr double kMaxStepNegativity = 0.05;

/// Above this value of dt * max(k ||Q||^2, beta, ||H||) a config is flagged.
inline constexpr double kStiffnessWarning = 0.05;

struct SmeStepResult {
  DensityMatrix state;
  double dy;  // record increment 4k<Q>dt + sqrt(2k) dW
};

/// One Euler-Maruyama step of
///   d rho = -i[H, rho]dt - k[Q,[Q,rho]]dt - beta[Z,[Z,rho]]dt
///           + sqrt(2k)(Q rho + rho Q - 2 Tr[Q rho] rho) dW
/// followed by projection onto the state manifold. Z = sigma_z; beta > 0
/// needs a qubit. Throws NumericalFailure if an eigenvalue before projection
/// falls below -kMaxStepNegativity or the result is non-finite.
SmeStepResult sme_step(const DensityMatrix& rho, const HermitianObservable& q, double k,
                       const HermitianObservable& h, double dt, double dw,
                       double dephasing_beta = 0.0);

/// Deterministic step of the measurement-averaged master equation (same
/// generator without the dW term).
DensityMatrix nonselective_step(const DensityMatrix& rho, const HermitianObservable& q, double k,
                                const HermitianObservable& h, double dephasing_beta, double dt);

/// Repeated nonselective_step from rho0 to time t (t / dt rounded to steps).
DensityMatrix integrate_nonselective(const DensityMatrix& rho0, const HermitianObservable& q,
                                     double k, const HermitianObservable& h,
                                     double dephasing_beta, double dt, double t);

using ObservableFn = std::function<HermitianObservable(double)>;
using TargetFn = std::function<PureState(double)>;

ObservableFn constant_observable(HermitianObservable q);

/// psi(t) = exp(-i H0 t) psi0, evaluated from a cached eigendecomposition.
TargetFn precessing_target(const PureState& psi0, const HermitianObservable& h0);

struct SmeConfig {
  DensityMatrix initial;
  ObservableFn observable;  // measured Q(t) in fixed_observable mode
  double k = 0.0;
  HermitianObservable drift;  // H0
  double dephasing_beta = 0.0;
  double dt = 1e-4;
  double t_end = 1.0;

  int steps() const;
  /// Throws std::invalid_argument on dt <= 0, t_end < 0, k < 0, beta < 0,
  /// dimension mismatches, or beta > 0 on a non-qubit.
  void validate() const;
  /// dt * max(k ||Q||^2, beta, ||H0||_op, extra_rate) at t = 0.
  double stiffness(double extra_rate = 0.0) const;
};

enum class PolicyMode { fixed_observable, relative_angle };

/// How the measured observable is chosen each step. In relative_angle mode
/// the qubit is measured along the Bloch direction at polar angle theta from
/// the current Bloch vector of rho, with azimuth phi measured from the
/// projection of +z (or +x when the Bloch vector is along z).
struct MeasurementPolicy {
  PolicyMode mode = PolicyMode::fixed_observable;
  double theta = 0.0;
  double phi = 0.0;

  static MeasurementPolicy fixed() { return {}; }
  static MeasurementPolicy relative_angle(double theta, double phi = 0.0);
  void validate() const;
};

/// Bloch direction selected by a relative_angle policy. `previous_axis` is
/// reused as the reference when rho's Bloch vector is shorter than 1e-9.
Eigen::Vector3d relative_measurement_axis(const DensityMatrix& rho, double theta, double phi,
                                          Eigen::Vector3d& previous_axis);

struct TrajectoryResult {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  std::vector<double> purities;
  std::vector<double> overlaps;                   // with the target at each time
  std::vector<double> records;                    // summed dy over each interval
  std::vector<HermitianObservable> fb_hamiltonians;  // H_fb at each interval start
  std::uint64_t seed;
};

/// One recorded grid point of a controlled trajectory.
struct TrajectorySample {
  int step;
  double t;
  const DensityMatrix& state;
  double overlap;  // with the target at t
  double record;   // dy summed over the interval ending here (0 at step 0)
  const HermitianObservable& feedback;  // H_fb applied at the interval start
};

using TrajectoryObserver = std::function<void(const TrajectorySample&)>;

/// Closed-loop control: each step selects Q from the policy, computes
/// H_fb = optimal_feedback(rho, target(t), mu), and advances with H0 + H_fb.
/// Calls `observer` at steps 0, stride, 2*stride, ... and at the final step.
/// Step rejections propagate as NumericalFailure.
void simulate_control(const SmeConfig& cfg, const MeasurementPolicy& policy,
                      const TargetFn& target, FeedbackStrength mu, RngStream& stream,
                      int record_stride, const TrajectoryObserver& observer);

/// As simulate_control, storing every recorded point.
TrajectoryResult run_control_trajectory(const SmeConfig& cfg, const MeasurementPolicy& policy,
                                        const TargetFn& target, FeedbackStrength mu,
                                        RngStream& stream, int record_stride = 1);

struct ZenoResult {
  bool success;
  DensityMatrix final_state;
};

/// Steers psi_start to the target by M projective measurements onto states
/// spaced evenly along the connecting great circle. Success means every
/// measurement landed on the projector branch.
ZenoResult inverse_zeno_run(const PureState& start, const PureState& target, int m,
                            RngStream& stream);

/// cos^{2M}(gamma / M), gamma = arccos |<start|target>|.
double zeno_success_probability(const PureState& start, const PureState& target, int m);

}  // namespace qfb
