#include "qfb/ensemble.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qfb/parallel.hpp"
#include "qfb/rng.hpp"

namespace qfb {
namespace {

// Running mean and sum of squared deviations.
struct Accumulator {
  double n = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    n += 1.0;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }

  void merge(const Accumulator& o) {
    if (o.n == 0.0) return;
    if (n == 0.0) {
      *this = o;
      return;
    }
    const double total = n + o.n;
    const double d = o.mean - mean;
    mean += d * o.n / total;
    m2 += o.m2 + d * d * n * o.n / total;
    n = total;
  }

  Estimate estimate() const {
    if (n < 2.0) return {mean, std::nullopt};
    return {mean, std::sqrt(m2 / (n - 1.0) / n)};
  }
};

struct BlockStats {
  std::vector<Accumulator> purity;
  std::vector<Accumulator> overlap;
  std::vector<Accumulator> re;  // grid point major, then column-major entries
  std::vector<Accumulator> im;
  Accumulator avg_purity;
  Accumulator avg_overlap;

  BlockStats(std::size_t points, std::size_t entries)
      : purity(points), overlap(points), re(points * entries), im(points * entries) {}

  void merge(const BlockStats& o) {
    for (std::size_t i = 0; i < purity.size(); ++i) {
      purity[i].merge(o.purity[i]);
      overlap[i].merge(o.overlap[i]);
    }
    for (std::size_t i = 0; i < re.size(); ++i) {
      re[i].merge(o.re[i]);
      im[i].merge(o.im[i]);
    }
    avg_purity.merge(o.avg_purity);
    avg_overlap.merge(o.avg_overlap);
  }
};

std::vector<double> stat_times(const SmeConfig& sme, int stride) {
  const int steps = sme.steps();
  std::vector<double> t;
  for (int s = 0; s <= steps; s += stride) t.push_back(s * sme.dt);
  if (steps % stride != 0) t.push_back(steps * sme.dt);
  return t;
}

}  // namespace

void EnsembleConfig::validate() const {
  if (realizations < 1) throw std::invalid_argument("EnsembleConfig: realizations must be >= 1");
  if (stat_stride < 1) throw std::invalid_argument("EnsembleConfig: stat_stride must be >= 1");
  if (!target) throw std::invalid_argument("EnsembleConfig: no target");
  if (!(transient_cutoff >= 0.0) || transient_cutoff > sme.t_end) {
    throw std::invalid_argument("EnsembleConfig: transient_cutoff must lie in [0, t_end]");
  }
  sme.validate();
  policy.validate();
}

EnsembleStats run_ensemble(const EnsembleConfig& cfg) {
  cfg.validate();
  const int n = cfg.sme.initial.dim();
  const std::size_t entries = static_cast<std::size_t>(n) * n;
  const std::vector<double> times = stat_times(cfg.sme, cfg.stat_stride);
  const std::size_t points = times.size();
  const double cutoff = cfg.transient_cutoff - 1e-12;

  const std::size_t r = static_cast<std::size_t>(cfg.realizations);
  const std::size_t blocks = (r + kReductionBlock - 1) / kReductionBlock;
  std::vector<BlockStats> partial;
  partial.reserve(blocks);
  for (std::size_t b = 0; b < blocks; ++b) partial.emplace_back(points, entries);

  parallel_for(blocks, cfg.threads, [&](std::size_t b) {
    BlockStats& acc = partial[b];
    const std::size_t end = std::min(r, (b + 1) * kReductionBlock);
    for (std::size_t i = b * kReductionBlock; i < end; ++i) {
      const std::uint64_t key = derive_stream_key(cfg.master_seed, i, cfg.stream_tag);
      RngStream stream(key);
      std::size_t g = 0;
      double sum_p = 0.0;
      double sum_o = 0.0;
      int counted = 0;
      auto observe = [&](const TrajectorySample& s) {
        const double p = purity(s.state);
        acc.purity[g].add(p);
        acc.overlap[g].add(s.overlap);
        const ComplexMatrix& m = s.state.matrix();
        for (std::size_t e = 0; e < entries; ++e) {
          acc.re[g * entries + e].add(m.data()[e].real());
          acc.im[g * entries + e].add(m.data()[e].imag());
        }
        if (s.t >= cutoff) {
          sum_p += p;
          sum_o += s.overlap;
          ++counted;
        }
        ++g;
      };
      try {
        simulate_control(cfg.sme, cfg.policy, cfg.target, cfg.mu, stream, cfg.stat_stride,
                         observe);
      } catch (const NumericalFailure& e) {
        std::ostringstream os;
        os << "trajectory " << i << " (master seed " << cfg.master_seed << ", stream key " << key
           << "): " << e.what();
        throw NumericalFailure(os.str());
      }
      acc.avg_purity.add(sum_p / counted);
      acc.avg_overlap.add(sum_o / counted);
    }
  });

  BlockStats total(points, entries);
  for (const BlockStats& b : partial) total.merge(b);

  EnsembleStats out;
  out.realizations = cfg.realizations;
  out.times = times;
  out.purity.reserve(points);
  out.overlap.reserve(points);
  for (std::size_t g = 0; g < points; ++g) {
    out.purity.push_back(total.purity[g].estimate());
    out.overlap.push_back(total.overlap[g].estimate());
    ComplexMatrix mean(n, n);
    ComplexMatrix se = ComplexMatrix::Zero(n, n);
    for (std::size_t e = 0; e < entries; ++e) {
      const Estimate re = total.re[g * entries + e].estimate();
      const Estimate im = total.im[g * entries + e].estimate();
      mean.data()[e] = Complex(re.mean, im.mean);
      if (re.se) se.data()[e] = Complex(*re.se, *im.se);
    }
    out.rho_mean.push_back(mean);
    if (cfg.realizations > 1) out.rho_se.push_back(se);
  }
  out.time_avg_purity = total.avg_purity.estimate();
  out.time_avg_overlap = total.avg_overlap.estimate();
  return out;
}

std::vector<ThetaRow> theta_experiment(const EnsembleConfig& base,
                                       std::span<const double> thetas) {
  if (thetas.empty()) throw std::invalid_argument("theta_experiment: empty angle grid");
  // Validate every angle before running anything.
  for (double theta : thetas) MeasurementPolicy::relative_angle(theta, base.policy.phi);
  std::vector<ThetaRow> rows;
  rows.reserve(thetas.size());
  for (std::size_t j = 0; j < thetas.size(); ++j) {
    EnsembleConfig cfg = base;
    cfg.policy = MeasurementPolicy::relative_angle(thetas[j], base.policy.phi);
    cfg.stream_tag = j;
    const EnsembleStats s = run_ensemble(cfg);
    rows.push_back({thetas[j], s.time_avg_purity, s.time_avg_overlap});
  }
  return rows;
}

}  // namespace qfb
