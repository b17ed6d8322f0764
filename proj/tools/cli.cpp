#include "cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"
#include "qfb/csv.hpp"
#include "qfb/ensemble.hpp"
#include "qfb/metrics.hpp"
#include "qfb/povm.hpp"
#include "qfb/rng.hpp"
#include "qfb/sde.hpp"

namespace qfb::cli {
namespace {

using Summary = std::vector<std::pair<std::string, std::string>>;
using Runner = std::function<Summary(std::ostream&)>;

struct Plan {
  Runner run;
  std::vector<std::string> warnings;
};

const char* const kExperiments[] = {"fig1", "fig2", "trajectory", "zeno", "rates", "sweep"};

// Flag name -> configuration key.
const std::pair<const char*, const char*> kOverrides[] = {
    {"--p", "measurement.p"},
    {"--kappa", "measurement.kappa"},
    {"--theta-points", "sweep.theta_points"},
    {"--k", "sme.k"},
    {"--beta", "sme.beta"},
    {"--mu", "feedback.mu"},
    {"--omega", "sme.omega"},
    {"--dt", "sme.dt"},
    {"--t-end", "sme.t_end"},
    {"--realizations", "ensemble.realizations"},
    {"--stride", "ensemble.stat_stride"},
    {"--theta", "policy.theta"},
    {"--phi", "policy.phi"},
    {"--m-list", "zeno.m_list"},
    {"--runs", "zeno.runs"},
    {"--k-list", "rates.k_list"},
    {"--q", "rates.q"},
};

std::string num(double x) { return csv::number(x); }

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

// -- fig1 ---------------------------------------------------------------------

Plan plan_fig1(Params& p) {
  const double prob = p.real("measurement.p", 0.1);
  const double kappa = p.real("measurement.kappa", 0.75);
  const double phi = p.real("policy.phi", 0.0);
  const int points = p.integer("sweep.theta_points", 181);
  require(prob > 0.0 && prob < 1.0, "measurement.p must lie in (0, 1)");
  require(points >= 2, "sweep.theta_points must be >= 2");
  kappa_povm({kappa, 0.0, phi});

  return {[=](std::ostream& os) {
            const std::vector<double> thetas = linspace(0.0, M_PI, points);
            const std::vector<ThetaSweepRow> rows = theta_sweep(prob, kappa, thetas, phi);
            csv::write_fig1(os, rows);
            std::size_t best = 0;
            for (std::size_t i = 1; i < rows.size(); ++i) {
              if (rows[i].i_f_p > rows[best].i_f_p) best = i;
            }
            return Summary{{"rows", std::to_string(rows.size())},
                           {"i_f_p_at_0", num(rows.front().i_f_p)},
                           {"n_e_p_at_0", num(rows.front().n_e_p)},
                           {"i_f_p_max", num(rows[best].i_f_p)},
                           {"theta_at_i_f_p_max", num(rows[best].theta)}};
          },
          {}};
}

// -- closed-loop experiments --------------------------------------------------

struct ControlSetup {
  EnsembleConfig ensemble;
  double stiffness;
};

// Precessing spin: rho(0) = |+x><+x|, H0 = omega sigma_z, target exp(-i H0 t)|+x>.
ControlSetup control_setup(Params& p, bool ensemble_keys) {
  const double omega = p.real("sme.omega", M_PI);
  const double beta = p.real("sme.beta", 0.4);
  const double k = p.real("sme.k", 2.0);
  const double mu = p.real("feedback.mu", 10.0);
  const double dt = p.real("sme.dt", 1e-4);
  const double t_end = p.real("sme.t_end", 2.0);
  const double phi = p.real("policy.phi", 0.0);
  const int stride = p.integer("ensemble.stat_stride", 10);
  const int realizations = ensemble_keys ? p.integer("ensemble.realizations", 1000) : 1;
  const double cutoff = ensemble_keys ? p.real("ensemble.transient_cutoff", 0.0) : 0.0;
  const std::uint64_t seed = p.u64("seed", 1);
  const int threads = p.integer("threads", 0);
  require(mu >= 0.0, "feedback.mu must be >= 0");

  ComplexVector plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const PureState psi0(plus);
  const HermitianObservable h0(omega * pauli_z().matrix());
  SmeConfig sme{DensityMatrix::pure(psi0), nullptr, k, h0, beta, dt, t_end};
  EnsembleConfig cfg{realizations,
                     seed,
                     sme,
                     MeasurementPolicy::relative_angle(0.0, 0.0),
                     FeedbackStrength(mu),
                     precessing_target(psi0, h0),
                     stride,
                     threads,
                     0,
                     cutoff};
  cfg.policy.phi = phi;
  cfg.validate();
  // Qubit spin observables have unit norm; feedback adds at most sqrt(mu/2).
  const double stiffness = sme.stiffness(std::max(k, std::abs(omega) + std::sqrt(mu / 2.0)));
  return {std::move(cfg), stiffness};
}

std::vector<std::string> stiffness_warnings(double s) {
  if (s <= kStiffnessWarning) return {};
  return {"dt * max rate = " + num(s) + " exceeds " + num(kStiffnessWarning) +
          "; results may be inaccurate"};
}

Plan plan_theta_table(Params& p, double theta_max) {
  ControlSetup setup = control_setup(p, true);
  const int points = p.integer("sweep.theta_points", 9);
  require(points >= 1, "sweep.theta_points must be >= 1");
  const std::vector<double> thetas =
      points == 1 ? std::vector<double>{0.0} : linspace(0.0, theta_max, points);
  for (double t : thetas) MeasurementPolicy::relative_angle(t, setup.ensemble.policy.phi);

  const EnsembleConfig base = setup.ensemble;
  return {[base, thetas, stiff = setup.stiffness](std::ostream& os) {
            const std::vector<ThetaRow> rows = theta_experiment(base, thetas);
            csv::write_theta_table(os, rows);
            std::size_t bp = 0;
            std::size_t bo = 0;
            for (std::size_t i = 1; i < rows.size(); ++i) {
              if (rows[i].purity.mean > rows[bp].purity.mean) bp = i;
              if (rows[i].overlap.mean > rows[bo].overlap.mean) bo = i;
            }
            return Summary{{"rows", std::to_string(rows.size())},
                           {"realizations", std::to_string(base.realizations)},
                           {"steps_per_trajectory", std::to_string(base.sme.steps())},
                           {"stiffness", num(stiff)},
                           {"purity_max", num(rows[bp].purity.mean)},
                           {"theta_at_purity_max", num(rows[bp].theta)},
                           {"overlap_max", num(rows[bo].overlap.mean)},
                           {"theta_at_overlap_max", num(rows[bo].theta)}};
          },
          stiffness_warnings(setup.stiffness)};
}

Plan plan_trajectory(Params& p) {
  ControlSetup setup = control_setup(p, false);
  const double theta = p.real("policy.theta", M_PI / 2);
  setup.ensemble.policy = MeasurementPolicy::relative_angle(theta, setup.ensemble.policy.phi);

  const EnsembleConfig cfg = setup.ensemble;
  return {[cfg](std::ostream& os) {
            RngStream stream(derive_stream_key(cfg.master_seed, 0));
            const TrajectoryResult tr = run_control_trajectory(cfg.sme, cfg.policy, cfg.target,
                                                               cfg.mu, stream, cfg.stat_stride);
            csv::write_trajectory(os, tr);
            double mp = 0.0;
            double mo = 0.0;
            for (std::size_t i = 0; i < tr.times.size(); ++i) {
              mp += tr.purities[i];
              mo += tr.overlaps[i];
            }
            const double n = static_cast<double>(tr.times.size());
            return Summary{{"rows", std::to_string(tr.times.size())},
                           {"stream_key", std::to_string(tr.seed)},
                           {"final_purity", num(tr.purities.back())},
                           {"final_overlap", num(tr.overlaps.back())},
                           {"mean_purity", num(mp / n)},
                           {"mean_overlap", num(mo / n)}};
          },
          stiffness_warnings(setup.stiffness)};
}

// -- zeno ---------------------------------------------------------------------

// Wilson score interval at 95%.
std::pair<double, double> wilson(long successes, long n) {
  const double z = 1.959963984540054;
  const double ph = static_cast<double>(successes) / n;
  const double denom = 1.0 + z * z / n;
  const double centre = (ph + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(ph * (1.0 - ph) / n + z * z / (4.0 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

Plan plan_zeno(Params& p) {
  const std::vector<int> ms = p.integers("zeno.m_list", {2, 10, 50, 200});
  const int runs = p.integer("zeno.runs", 10000);
  const std::uint64_t seed = p.u64("seed", 1);
  for (int m : ms) require(m >= 1, "zeno.m_list entries must be >= 1");
  require(runs >= 1, "zeno.runs must be >= 1");

  return {[=](std::ostream& os) {
            const PureState start = PureState::basis(2, 0);
            const PureState target = PureState::basis(2, 1);
            csv::write_row(os, {"M", "runs", "successes", "empirical_rate", "ci95_low",
                                "ci95_high", "analytic"});
            Summary summary{{"rows", std::to_string(ms.size())}};
            for (std::size_t j = 0; j < ms.size(); ++j) {
              long successes = 0;
              for (int r = 0; r < runs; ++r) {
                RngStream stream(derive_stream_key(seed, static_cast<std::uint64_t>(r), j));
                if (inverse_zeno_run(start, target, ms[j], stream).success) ++successes;
              }
              const auto [lo, hi] = wilson(successes, runs);
              const double analytic = zeno_success_probability(start, target, ms[j]);
              const double rate = static_cast<double>(successes) / runs;
              csv::write_row(os, {std::to_string(ms[j]), std::to_string(runs),
                                  std::to_string(successes), num(rate), num(lo), num(hi),
                                  num(analytic)});
              summary.emplace_back("rate_M" + std::to_string(ms[j]), num(rate));
            }
            return summary;
          },
          {}};
}

// -- rates --------------------------------------------------------------------

HermitianObservable parse_observable(const std::string& spec) {
  if (spec == "sigma_x") return pauli_x();
  if (spec == "sigma_y") return pauli_y();
  if (spec == "sigma_z") return pauli_z();
  const std::string prefix = "diag:";
  if (spec.rfind(prefix, 0) == 0) {
    std::vector<double> d;
    std::stringstream ss(spec.substr(prefix.size()));
    std::string item;
    while (std::getline(ss, item, ';')) d.push_back(parse_real(item, "rates.q"));
    require(d.size() >= 2 && d.size() <= static_cast<std::size_t>(kMaxDim),
            "rates.q: diag needs 2.." + std::to_string(kMaxDim) + " entries");
    ComplexMatrix m = ComplexMatrix::Zero(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return HermitianObservable(m);
  }
  throw ConfigError("rates.q: expected sigma_x, sigma_y, sigma_z or diag:a;b;...");
}

Plan plan_rates(Params& p) {
  const HermitianObservable q = parse_observable(p.text("rates.q", "sigma_z"));
  const std::vector<double> ks = p.reals("rates.k_list", {0.5, 1.0, 2.0});
  RateOptions opt;
  opt.realizations = p.integer("rates.realizations", opt.realizations);
  opt.horizon = p.real("rates.horizon", opt.horizon);
  opt.steps = p.integer("rates.steps", opt.steps);
  opt.threads = p.integer("threads", 0);
  const std::uint64_t seed = p.u64("seed", 1);
  for (double k : ks) require(k >= 0.0, "rates.k_list entries must be >= 0");
  require(opt.realizations >= 2, "rates.realizations must be >= 2");
  require(opt.horizon > 0.0, "rates.horizon must be > 0");
  require(opt.steps >= 1, "rates.steps must be >= 1");

  return {[=](std::ostream& os) {
            csv::write_row(os, {"k", "rate_p", "rate_p_se", "rate_v", "rate_v_se",
                                "paper_rate_p", "paper_rate_v", "ratio_p", "ratio_v"});
            std::vector<double> rp;
            std::vector<double> rv;
            double worst_rel_se = 0.0;
            for (std::size_t i = 0; i < ks.size(); ++i) {
              RateOptions o = opt;
              o.seed = derive_stream_key(seed, i);
              const StrengthRate r = strength_rate_numeric(q, ks[i], o);
              const ClosedFormRates c = published_strength_rates(q, ks[i]);
              const double ratio_p = c.rate_p != 0.0 ? r.rate_p / c.rate_p : 0.0;
              const double ratio_v = c.rate_v != 0.0 ? r.rate_v / c.rate_v : 0.0;
              if (ks[i] > 0.0) {
                rp.push_back(ratio_p);
                rv.push_back(ratio_v);
                worst_rel_se = std::max({worst_rel_se, r.rate_p_se / std::abs(r.rate_p),
                                         r.rate_v_se / std::abs(r.rate_v)});
              }
              csv::write_row(os, {num(ks[i]), num(r.rate_p), num(r.rate_p_se), num(r.rate_v),
                                  num(r.rate_v_se), num(c.rate_p), num(c.rate_v), num(ratio_p),
                                  num(ratio_v)});
            }
            auto mean = [](const std::vector<double>& v) {
              double s = 0.0;
              for (double x : v) s += x;
              return v.empty() ? 0.0 : s / v.size();
            };
            auto spread = [](const std::vector<double>& v) {
              if (v.empty()) return 0.0;
              const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
              return *hi - *lo;
            };
            return Summary{
                {"rows", std::to_string(ks.size())},
                {"ratio_p_mean", num(mean(rp))},
                {"ratio_p_spread", num(spread(rp))},
                {"ratio_v_mean", num(mean(rv))},
                {"ratio_v_spread", num(spread(rv))},
                {"max_relative_se", num(worst_rel_se)},
                {"note", "ratio = numeric / printed closed form; a k-independent ratio other "
                         "than 1 is a constant-factor deviation from the printed formula"}};
          },
          {}};
}

Plan make_plan(const std::string& experiment, Params& p) {
  if (experiment == "fig1") return plan_fig1(p);
  if (experiment == "fig2") return plan_theta_table(p, M_PI / 2);
  if (experiment == "sweep") return plan_theta_table(p, M_PI);
  if (experiment == "trajectory") return plan_trajectory(p);
  if (experiment == "zeno") return plan_zeno(p);
  if (experiment == "rates") return plan_rates(p);
  throw ConfigError("unknown experiment '" + experiment + "'");
}

void write_manifest(const std::string& path, const std::string& experiment, const Params& p,
                    double seconds, const Summary& summary, const std::string& output) {
  std::ofstream m(path, std::ios::binary);
  if (!m) throw IoError("cannot write manifest '" + path + "'");
  m << "experiment = " << experiment << '\n';
  m << "version = " << QFB_VERSION << '\n';
  m << "output = " << output << '\n';
  m << "duration_seconds = " << num(seconds) << '\n';
  for (const auto& [key, value] : p.echo()) m << "config." << key << " = " << value << '\n';
  for (const auto& [key, value] : summary) m << "summary." << key << " = " << value << '\n';
  if (!m) throw IoError("error writing manifest '" + path + "'");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum feedback control experiments"};
  std::string experiment;
  std::string config_path;
  std::string out_path = "-";
  std::vector<std::string> sets;
  std::map<std::string, std::string> flag_values;
  std::map<std::string, CLI::Option*> flag_options;

  app.add_option("--experiment,-e", experiment, "fig1, fig2, trajectory, zeno, rates or sweep");
  app.add_option("--config,-c", config_path, "key = value configuration file");
  app.add_option("--out,-o", out_path, "output CSV path ('-' for stdout, no manifest)");
  auto* seed_opt = app.add_option("--seed", flag_values["seed"], "64-bit master seed");
  auto* threads_opt = app.add_option("--threads", flag_values["threads"], "worker threads");
  app.add_option("--set", sets, "extra key=value override (repeatable)");
  for (const auto& [flag, key] : kOverrides) {
    flag_options[key] = app.add_option(flag, flag_values[key], std::string("sets ") + key);
  }
  flag_options["seed"] = seed_opt;
  flag_options["threads"] = threads_opt;

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  Params params;
  std::string resolved_experiment;
  Plan plan;
  try {
    if (!config_path.empty()) params = Params::load(config_path);
    for (const auto& [key, opt] : flag_options) {
      if (opt->count() > 0) params.set(key, flag_values[key]);
    }
    for (const std::string& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
      params.set(s.substr(0, eq), s.substr(eq + 1));
    }
    if (!experiment.empty()) params.set("experiment", experiment);
    resolved_experiment = params.text("experiment", "");
    if (resolved_experiment.empty()) {
      throw ConfigError("no experiment given (--experiment or 'experiment = ...')");
    }
    plan = make_plan(resolved_experiment, params);
    params.integer("threads", 0);
    params.u64("seed", 1);
    params.reject_unused();
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  for (const std::string& w : plan.warnings) err << "warning: " << w << '\n';

  std::ofstream file;
  const bool to_stdout = out_path == "-";
  if (!to_stdout) {
    file.open(out_path, std::ios::binary);
    if (!file) {
      err << "error: cannot open output '" << out_path << "'\n";
      return kIoError;
    }
  }
  std::ostream& sink = to_stdout ? out : file;

  const auto t0 = std::chrono::steady_clock::now();
  Summary summary;
  try {
    summary = plan.run(sink);
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (!to_stdout) {
    file.close();
    if (!file) {
      err << "error: failed writing '" << out_path << "'\n";
      return kIoError;
    }
    try {
      write_manifest(out_path + ".manifest", resolved_experiment, params, seconds, summary,
                     out_path);
    } catch (const IoError& e) {
      err << "error: " << e.what() << '\n';
      return kIoError;
    }
  } else {
    sink.flush();
  }
  return kOk;
}

}  // namespace qfb::cli
