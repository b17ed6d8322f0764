#include "qfb/sde.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "trusted.hpp"

namespace qfb {
namespace {

// -i[H, rho] - k[Q,[Q,rho]] - beta[Z,[Z,rho]].
ComplexMatrix generator(const ComplexMatrix& rho, const ComplexMatrix& q, double k,
                        const ComplexMatrix& h, double beta) {
  const ComplexMatrix hr = h * rho;
  ComplexMatrix out = Complex(0.0, -1.0) * (hr - hr.adjoint());
  if (k != 0.0) {
    const ComplexMatrix qr = q * rho;
    const ComplexMatrix c = qr - qr.adjoint();
    const ComplexMatrix qc = q * c;
    out -= k * (qc + qc.adjoint());
  }
  if (beta != 0.0) {
    // [Z,[Z,rho]] = 4 offdiag(rho) for a qubit.
    out(0, 1) -= 4.0 * beta * rho(0, 1);
    out(1, 0) -= 4.0 * beta * rho(1, 0);
  }
  return out;
}

DensityMatrix finish_step(const ComplexMatrix& m, const char* where) {
  if (!m.allFinite()) {
    throw NumericalFailure(std::string(where) + ": non-finite state after step");
  }
  Projection p = [&] {
    try {
      return project_to_state(m);
    } catch (const std::domain_error& e) {
      throw NumericalFailure(std::string(where) + ": " + e.what());
    }
  }();
  if (p.min_eigenvalue < -kMaxStepNegativity) {
    std::ostringstream os;
    os << where << ": step rejected, eigenvalue " << p.min_eigenvalue
       << " before projection (dt too large)";
    throw NumericalFailure(os.str());
  }
  return std::move(p.state);
}

void check_dims(const DensityMatrix& rho, const HermitianObservable& q,
                const HermitianObservable& h, double k, double dt, double beta,
                const char* where) {
  if (q.dim() != rho.dim() || h.dim() != rho.dim()) {
    throw std::invalid_argument(std::string(where) + ": dimension mismatch");
  }
  if (!(k >= 0.0) || !std::isfinite(k)) {
    throw std::invalid_argument(std::string(where) + ": k must be finite and >= 0");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument(std::string(where) + ": dt must be positive");
  }
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw std::invalid_argument(std::string(where) + ": beta must be finite and >= 0");
  }
  if (beta > 0.0 && rho.dim() != 2) {
    throw std::invalid_argument(std::string(where) + ": dephasing requires a qubit");
  }
}

SmeStepResult sme_step_unchecked(const ComplexMatrix& rho, const ComplexMatrix& q, double k,
                                 const ComplexMatrix& h, double dt, double dw, double beta) {
  ComplexMatrix next = rho + dt * generator(rho, q, k, h, beta);
  double dy = 0.0;
  if (k != 0.0) {
    const double amp = std::sqrt(2.0 * k);
    const ComplexMatrix qr = q * rho;
    const double mean_q = qr.trace().real();
    next += (amp * dw) * (qr + qr.adjoint() - 2.0 * mean_q * rho);
    dy = 4.0 * k * mean_q * dt + amp * dw;
  }
  return {finish_step(next, "sme_step"), dy};
}

double op_norm(const ComplexMatrix& m) {
  const RealVector ev = eigenvalues_hermitian(m);
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

}  // namespace

SmeStepResult sme_step(const DensityMatrix& rho, const HermitianObservable& q, double k,
                       const HermitianObservable& h, double dt, double dw,
                       double dephasing_beta) {
  check_dims(rho, q, h, k, dt, dephasing_beta, "sme_step");
  if (!std::isfinite(dw)) throw std::invalid_argument("sme_step: dW must be finite");
  return sme_step_unchecked(rho.matrix(), q.matrix(), k, h.matrix(), dt, dw, dephasing_beta);
}

DensityMatrix nonselective_step(const DensityMatrix& rho, const HermitianObservable& q, double k,
                                const HermitianObservable& h, double dephasing_beta, double dt) {
  check_dims(rho, q, h, k, dt, dephasing_beta, "nonselective_step");
  const ComplexMatrix next =
      rho.matrix() + dt * generator(rho.matrix(), q.matrix(), k, h.matrix(), dephasing_beta);
  return finish_step(next, "nonselective_step");
}

DensityMatrix integrate_nonselective(const DensityMatrix& rho0, const HermitianObservable& q,
                                     double k, const HermitianObservable& h,
                                     double dephasing_beta, double dt, double t) {
  check_dims(rho0, q, h, k, dt, dephasing_beta, "integrate_nonselective");
  if (!(t >= 0.0)) throw std::invalid_argument("integrate_nonselective: t must be >= 0");
  const long steps = std::lround(t / dt);
  DensityMatrix rho = rho0;
  for (long i = 0; i < steps; ++i) {
    const ComplexMatrix next =
        rho.matrix() + dt * generator(rho.matrix(), q.matrix(), k, h.matrix(), dephasing_beta);
    rho = finish_step(next, "integrate_nonselective");
  }
  return rho;
}

ObservableFn constant_observable(HermitianObservable q) {
  return [q = std::move(q)](double) { return q; };
}

TargetFn precessing_target(const PureState& psi0, const HermitianObservable& h0) {
  if (psi0.dim() != h0.dim()) throw std::invalid_argument("precessing_target: dimension mismatch");
  const Spectrum s = eig_hermitian(h0);
  const ComplexVector coeffs = s.vectors.adjoint() * psi0.vector();
  return [s, coeffs](double t) {
    ComplexVector c = coeffs;
    for (int j = 0; j < c.size(); ++j) c(j) *= std::polar(1.0, -s.values(j) * t);
    return PureState::normalized(s.vectors * c);
  };
}

int SmeConfig::steps() const { return static_cast<int>(std::lround(t_end / dt)); }

void SmeConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("SmeConfig: dt must be > 0");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) {
    throw std::invalid_argument("SmeConfig: t_end must be >= 0");
  }
  if (!(k >= 0.0) || !std::isfinite(k)) throw std::invalid_argument("SmeConfig: k must be >= 0");
  if (!(dephasing_beta >= 0.0) || !std::isfinite(dephasing_beta)) {
    throw std::invalid_argument("SmeConfig: dephasing_beta must be >= 0");
  }
  if (drift.dim() != initial.dim()) throw std::invalid_argument("SmeConfig: H0 dimension mismatch");
  if (dephasing_beta > 0.0 && initial.dim() != 2) {
    throw std::invalid_argument("SmeConfig: dephasing requires a qubit");
  }
  if (std::abs(t_end / dt - std::round(t_end / dt)) > 1e-6) {
    throw std::invalid_argument("SmeConfig: t_end must be a multiple of dt");
  }
  if (observable && observable(0.0).dim() != initial.dim()) {
    throw std::invalid_argument("SmeConfig: observable dimension mismatch");
  }
}

double SmeConfig::stiffness(double extra_rate) const {
  double rate = std::max(dephasing_beta, extra_rate);
  rate = std::max(rate, op_norm(drift.matrix()));
  if (k > 0.0 && observable) {
    const double qn = op_norm(observable(0.0).matrix());
    rate = std::max(rate, k * qn * qn);
  }
  return dt * rate;
}

MeasurementPolicy MeasurementPolicy::relative_angle(double theta, double phi) {
  MeasurementPolicy p{PolicyMode::relative_angle, theta, phi};
  p.validate();
  return p;
}

void MeasurementPolicy::validate() const {
  if (mode != PolicyMode::relative_angle) return;
  if (!(theta >= 0.0 && theta <= M_PI)) {
    throw std::invalid_argument("MeasurementPolicy: theta must lie in [0, pi]");
  }
  if (!(phi >= 0.0 && phi < 2.0 * M_PI)) {
    throw std::invalid_argument("MeasurementPolicy: phi must lie in [0, 2 pi)");
  }
}

Eigen::Vector3d relative_measurement_axis(const DensityMatrix& rho, double theta, double phi,
                                          Eigen::Vector3d& previous_axis) {
  if (rho.dim() != 2) throw std::invalid_argument("relative_measurement_axis: qubit only");
  const Eigen::Vector3d r = bloch_vector(rho);
  const double len = r.norm();
  Eigen::Vector3d n = previous_axis;
  if (len >= 1e-9) {
    n = r / len;
    previous_axis = n;
  }
  Eigen::Vector3d e1 = Eigen::Vector3d::UnitZ() - n.z() * n;
  if (e1.norm() < 1e-6) e1 = Eigen::Vector3d::UnitX() - n.x() * n;
  e1.normalize();
  const Eigen::Vector3d e2 = n.cross(e1);
  return std::cos(theta) * n + std::sin(theta) * (std::cos(phi) * e1 + std::sin(phi) * e2);
}

void simulate_control(const SmeConfig& cfg, const MeasurementPolicy& policy,
                      const TargetFn& target, FeedbackStrength mu, RngStream& stream,
                      int record_stride, const TrajectoryObserver& observer) {
  cfg.validate();
  policy.validate();
  if (record_stride < 1) throw std::invalid_argument("simulate_control: record_stride must be >= 1");
  if (!target) throw std::invalid_argument("simulate_control: no target");
  const int n = cfg.initial.dim();
  if (target(0.0).dim() != n) throw std::invalid_argument("simulate_control: target dimension");
  if (cfg.k > 0.0 && policy.mode == PolicyMode::fixed_observable && !cfg.observable) {
    throw std::invalid_argument("simulate_control: fixed_observable policy without an observable");
  }
  if (policy.mode == PolicyMode::relative_angle && n != 2) {
    throw std::invalid_argument("simulate_control: relative_angle policy requires a qubit");
  }

  const int steps = cfg.steps();
  const double sqrt_dt = std::sqrt(cfg.dt);
  const bool measuring = cfg.k > 0.0;
  const HermitianObservable zero = HermitianObservable::zero(n);
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();

  DensityMatrix rho = cfg.initial;
  HermitianObservable interval_fb = zero;
  double record = 0.0;
  if (observer) observer({0, 0.0, rho, overlap(rho, target(0.0)), 0.0, zero});

  for (int i = 0; i < steps; ++i) {
    const double t = i * cfg.dt;
    const PureState psi = target(t);
    ComplexMatrix q;
    if (!measuring) {
      q = ComplexMatrix::Zero(n, n);
    } else if (policy.mode == PolicyMode::relative_angle) {
      q = spin_along(relative_measurement_axis(rho, policy.theta, policy.phi, axis)).matrix();
    } else {
      q = cfg.observable(t).matrix();
    }
    FeedbackDecision fb = optimal_feedback(rho, psi, mu);
    const ComplexMatrix h = cfg.drift.matrix() + fb.hamiltonian.matrix();
    const double dw = measuring ? sqrt_dt * stream.normal() : 0.0;
    SmeStepResult r = [&] {
      try {
        return sme_step_unchecked(rho.matrix(), q, cfg.k, h, cfg.dt, dw, cfg.dephasing_beta);
      } catch (const NumericalFailure& e) {
        std::ostringstream os;
        os << e.what() << " at step " << i << " (t = " << t << ", stream " << stream.key() << ")";
        throw NumericalFailure(os.str());
      }
    }();
    rho = std::move(r.state);
    record += r.dy;
    if (i % record_stride == 0) interval_fb = std::move(fb.hamiltonian);

    const int done = i + 1;
    if (observer && (done % record_stride == 0 || done == steps)) {
      const double tn = done * cfg.dt;
      observer({done, tn, rho, overlap(rho, target(tn)), record, interval_fb});
      record = 0.0;
    }
  }
}

TrajectoryResult run_control_trajectory(const SmeConfig& cfg, const MeasurementPolicy& policy,
                                        const TargetFn& target, FeedbackStrength mu,
                                        RngStream& stream, int record_stride) {
  TrajectoryResult out{{}, {}, {}, {}, {}, {}, stream.key()};
  simulate_control(cfg, policy, target, mu, stream, record_stride,
                   [&](const TrajectorySample& s) {
                     out.times.push_back(s.t);
                     out.states.push_back(s.state);
                     out.purities.push_back(purity(s.state));
                     out.overlaps.push_back(s.overlap);
                     if (s.step > 0) {
                       out.records.push_back(s.record);
                       out.fb_hamiltonians.push_back(s.feedback);
                     }
                   });
  return out;
}

ZenoResult inverse_zeno_run(const PureState& start, const PureState& target, int m,
                            RngStream& stream) {
  if (start.dim() != target.dim()) throw std::invalid_argument("inverse_zeno_run: dimension mismatch");
  if (m < 1) throw std::invalid_argument("inverse_zeno_run: M must be >= 1");
  const ComplexVector& a = start.vector();
  const Complex c = a.dot(target.vector());
  const double mag = std::abs(c);
  const DensityMatrix goal = DensityMatrix::pure(target);
  if (mag >= 1.0 - 1e-15) return {true, goal};

  // Align the target's phase so the geodesic lies in a real 2-plane.
  const ComplexVector b = mag > 0.0 ? ComplexVector(target.vector() * (std::conj(c) / mag))
                                    : target.vector();
  const double gamma = std::acos(mag);
  const ComplexVector w = (b - mag * a) / std::sin(gamma);

  ComplexVector psi = a;
  for (int i = 1; i <= m; ++i) {
    const double eps = gamma * i / m;
    const ComplexVector e = std::cos(eps) * a + std::sin(eps) * w;
    const Complex amp = e.dot(psi);
    const double p = std::norm(amp);
    if (stream.uniform() < p) {
      psi = e;
      continue;
    }
    ComplexVector rest = psi - e * amp;
    return {false, DensityMatrix::pure(PureState::normalized(rest))};
  }
  return {true, goal};
}

double zeno_success_probability(const PureState& start, const PureState& target, int m) {
  if (start.dim() != target.dim()) {
    throw std::invalid_argument("zeno_success_probability: dimension mismatch");
  }
  if (m < 1) throw std::invalid_argument("zeno_success_probability: M must be >= 1");
  const double gamma = std::acos(std::min(1.0, std::abs(start.vector().dot(target.vector()))));
  return std::pow(std::cos(gamma / m), 2.0 * m);
}

}  // namespace qfb
