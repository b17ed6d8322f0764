#include <cmath>
#include <stdexcept>
#include <vector>

#include "qfb/metrics.hpp"
#include "qfb/parallel.hpp"
#include "qfb/rng.hpp"
#include "qfb/sde.hpp"

namespace qfb {
namespace {

struct MeanSe {
  double mean;
  double se;
};

MeanSe mean_se(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mean = sum / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double var = v.size() > 1 ? ss / (n - 1.0) : 0.0;
  return {mean, std::sqrt(var / n)};
}

}  // namespace

StrengthRate strength_rate_numeric(const HermitianObservable& q, double k,
                                   const RateOptions& options) {
  const int n = q.dim();
  if (n < 2) throw std::invalid_argument("strength_rate_numeric: requires dimension >= 2");
  if (!(k >= 0.0) || !std::isfinite(k)) {
    throw std::invalid_argument("strength_rate_numeric: k must be finite and >= 0");
  }
  if (options.realizations < 2 || options.steps < 1 || !(options.horizon > 0.0)) {
    throw std::invalid_argument("strength_rate_numeric: bad options");
  }
  if (k == 0.0) return {0.0, 0.0, 0.0, 0.0};

  const double dt = options.horizon / options.steps;
  const double sqrt_dt = std::sqrt(dt);
  const double ln_n = std::log(static_cast<double>(n));
  const DensityMatrix mixed = DensityMatrix::maximally_mixed(n);
  const HermitianObservable h = HermitianObservable::zero(n);

  // Per-trajectory purity gain and entropy loss after the horizon.
  const std::size_t r = static_cast<std::size_t>(options.realizations);
  std::vector<double> purity_gain(r);
  std::vector<double> entropy_loss(r);
  parallel_for(r, options.threads, [&](std::size_t i) {
    RngStream stream(derive_stream_key(options.seed, i));
    DensityMatrix rho = mixed;
    for (int s = 0; s < options.steps; ++s) {
      rho = sme_step(rho, q, k, h, dt, sqrt_dt * stream.normal()).state;
    }
    purity_gain[i] = purity(rho) - 1.0 / n;
    entropy_loss[i] = ln_n - von_neumann_entropy(rho);
  });

  // s = 1/u - 1/u0 with u = u0 - mean gain; se by the delta method.
  const MeanSe gp = mean_se(purity_gain);
  const MeanSe gv = mean_se(entropy_loss);
  const double t = options.horizon;
  const double up0 = 1.0 - 1.0 / n;
  const double up = up0 - gp.mean;
  const double uv = ln_n - gv.mean;
  return {(1.0 / uv - 1.0 / ln_n) / t, gv.se / (uv * uv * t), (1.0 / up - 1.0 / up0) / t,
          gp.se / (up * up * t)};
}

}  // namespace qfb
