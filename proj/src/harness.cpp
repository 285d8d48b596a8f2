#include "ebfission/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "ebfission/csv.hpp"
#include "ebfission/error.hpp"
#include "ebfission/random.hpp"

namespace ebfission {

// ---------------------------------------------------------------------------
// Configuration

namespace {

EstimatorSpec spec_of(EstimatorKind kind) {
  EstimatorSpec s;
  s.kind = kind;
  return s;
}

}  // namespace

EstimatorSpec EstimatorSpec::mle() { return spec_of(EstimatorKind::Mle); }

EstimatorSpec EstimatorSpec::npmle_default(NpmleOptions opts) {
  EstimatorSpec s = spec_of(EstimatorKind::Npmle);
  s.npmle = opts;
  return s;
}

EstimatorSpec EstimatorSpec::aurora(double g_split, std::size_t fission_reps) {
  EstimatorSpec s = spec_of(EstimatorKind::Aurora);
  s.g_split = g_split;
  s.fission_reps = fission_reps;
  return s;
}

EstimatorSpec EstimatorSpec::oracle_bayes() { return spec_of(EstimatorKind::OracleBayes); }

std::string EstimatorSpec::label() const {
  switch (kind) {
    case EstimatorKind::Mle:
      return "mle";
    case EstimatorKind::Npmle:
      return "npmle";
    case EstimatorKind::OracleBayes:
      return "oracle_bayes";
    case EstimatorKind::Aurora: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "aurora_g%g_r%zu", g_split, fission_reps);
      return buf;
    }
  }
  return "unknown";
}

ExperimentConfig ExperimentConfig::benchmark_defaults(LikelihoodModel lik, std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.lik = lik;
  cfg.base_seed = seed;
  cfg.estimators = {EstimatorSpec::mle(), EstimatorSpec::npmle_default(),
                    EstimatorSpec::aurora(0.04, 100), EstimatorSpec::aurora(0.14, 100),
                    EstimatorSpec::oracle_bayes()};
  return cfg;
}

void ExperimentConfig::validate() const {
  if (n < 2) throw ConfigError("experiment needs n >= 2");
  if (mc_reps < 1) throw ConfigError("experiment needs mc_reps >= 1");
  if (estimators.empty()) throw ConfigError("experiment needs at least one estimator");
  lik.check_prior(prior);
  std::vector<std::string> labels;
  for (const auto& e : estimators) {
    if (e.kind == EstimatorKind::Aurora) {
      fission_for(lik, e.g_split);
      if (e.fission_reps < 1) throw ConfigError("Aurora needs fission_reps >= 1");
    }
    if (e.kind == EstimatorKind::Npmle) {
      if (e.npmle.grid_size < 2) throw ConfigError("NPMLE grid_size must be >= 2");
      if (e.npmle.max_iter < 1) throw ConfigError("NPMLE max_iter must be >= 1");
    }
    const auto label = e.label();
    if (std::find(labels.begin(), labels.end(), label) != labels.end()) {
      throw ConfigError("duplicate estimator '" + label + "'");
    }
    labels.push_back(label);
  }
}

const EstimatorSummary& SimulationReport::find(const std::string& label) const {
  for (const auto& e : estimators) {
    if (e.label == label) return e;
  }
  throw InputError("no estimator named '" + label + "' in report");
}

// ---------------------------------------------------------------------------
// Running

std::uint64_t dataset_seed(std::uint64_t base_seed, std::size_t rep) noexcept {
  return derive_seed(base_seed, rep, 0);
}

std::uint64_t estimator_seed(std::uint64_t base_seed, std::size_t rep, std::size_t index) noexcept {
  return derive_seed(base_seed, rep, 1 + index);
}

std::uint64_t dataset_checksum(const Dataset& data) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const std::vector<double>& v) {
    for (double d : v) {
      unsigned char bytes[sizeof(double)];
      std::memcpy(bytes, &d, sizeof d);
      for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
      }
    }
  };
  feed(data.thetas);
  feed(data.xs);
  return h;
}

namespace {

EstimateVector run_estimator(const EstimatorSpec& spec, const ExperimentConfig& cfg,
                             const Dataset& data, std::uint64_t seed, bool& converged) {
  converged = true;
  switch (spec.kind) {
    case EstimatorKind::Mle:
      return mle_estimate(data.xs);
    case EstimatorKind::OracleBayes:
      return oracle_bayes_estimate(data.xs, cfg.prior, cfg.lik);
    case EstimatorKind::Npmle: {
      const auto fit = fit_npmle(data.xs, cfg.lik, spec.npmle);
      converged = fit.converged;
      return npmle_estimate(data.xs, fit, cfg.lik);
    }
    case EstimatorKind::Aurora: {
      AuroraConfig acfg;
      acfg.fission = fission_for(cfg.lik, spec.g_split);
      acfg.fission_reps = spec.fission_reps;
      acfg.base_seed = seed;
      acfg.threads = 1;
      return aurora_estimate(data.xs, acfg);
    }
  }
  throw ConfigError("unknown estimator kind");
}

}  // namespace

SimulationReport run_experiment(const ExperimentConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::size_t reps = cfg.mc_reps;
  const std::size_t num_est = cfg.estimators.size();

  std::vector<double> mse_table(reps * num_est, 0.0);
  std::vector<char> converged_table(reps * num_est, 1);
  std::vector<std::uint64_t> checksums(reps, 0);
  std::mutex progress_mutex;

  parallel_for(reps, cfg.threads, [&](std::size_t r) {
    const std::uint64_t seed = dataset_seed(cfg.base_seed, r);
    std::size_t current = num_est;
    try {
      const Dataset data = sample_dataset(cfg.prior, cfg.lik, cfg.n, seed);
      checksums[r] = dataset_checksum(data);
      for (current = 0; current < num_est; ++current) {
        bool converged = true;
        const auto est = run_estimator(cfg.estimators[current], cfg, data,
                                       estimator_seed(cfg.base_seed, r, current), converged);
        mse_table[r * num_est + current] = mse(est, data.thetas);
        converged_table[r * num_est + current] = converged ? 1 : 0;
      }
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "rep " << r << " (dataset seed " << seed << ")";
      if (current < num_est) msg << ", estimator " << cfg.estimators[current].label();
      msg << ": " << e.what();
      throw RuntimeError(msg.str());
    }
    if (progress) {
      std::lock_guard lock(progress_mutex);
      progress(r, checksums[r]);
    }
  });

  SimulationReport report;
  report.config = cfg;
  report.dataset_checksums = std::move(checksums);
  for (std::size_t e = 0; e < num_est; ++e) {
    EstimatorSummary s;
    s.label = cfg.estimators[e].label();
    s.per_rep_mse.resize(reps);
    double sum = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      s.per_rep_mse[r] = mse_table[r * num_est + e];
      sum += s.per_rep_mse[r];
      if (!converged_table[r * num_est + e]) ++s.unconverged;
    }
    s.mean_mse = sum / static_cast<double>(reps);
    if (reps > 1) {
      double ss = 0.0;
      for (double v : s.per_rep_mse) ss += (v - s.mean_mse) * (v - s.mean_mse);
      s.se_mse = std::sqrt(ss / static_cast<double>(reps - 1)) / std::sqrt(static_cast<double>(reps));
    }
    report.estimators.push_back(std::move(s));
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

// ---------------------------------------------------------------------------
// Output

void write_table_csv(std::ostream& os, std::span<const SimulationReport> reports) {
  os << "estimator,likelihood,mean_mse,se_mse,n,mc_reps,seed\n";
  for (const auto& rep : reports) {
    for (const auto& e : rep.estimators) {
      os << e.label << ',' << rep.config.lik.name() << ',' << format_double(e.mean_mse) << ','
         << format_double(e.se_mse) << ',' << rep.config.n << ',' << rep.config.mc_reps << ','
         << rep.config.base_seed << '\n';
    }
  }
}

std::string report_json(std::span<const SimulationReport> reports) {
  using nlohmann::json;
  json experiments = json::array();
  for (const auto& rep : reports) {
    const auto& cfg = rep.config;
    json estimators = json::array();
    for (std::size_t e = 0; e < rep.estimators.size(); ++e) {
      const auto& spec = cfg.estimators[e];
      const auto& sum = rep.estimators[e];
      json item = {{"label", sum.label},
                   {"mean_mse", sum.mean_mse},
                   {"se_mse", sum.se_mse},
                   {"per_rep_mse", sum.per_rep_mse}};
      if (spec.kind == EstimatorKind::Aurora) {
        item["g_split"] = spec.g_split;
        item["fission_reps"] = spec.fission_reps;
        item["tau"] = tau_from_info_split(scheme_for(cfg.lik), spec.g_split);
      }
      if (spec.kind == EstimatorKind::Npmle) {
        item["grid_size"] = spec.npmle.grid_size;
        item["max_iter"] = spec.npmle.max_iter;
        item["tol"] = spec.npmle.tol;
        item["unconverged_reps"] = sum.unconverged;
      }
      estimators.push_back(std::move(item));
    }
    json lik = {{"kind", std::string(cfg.lik.name())}};
    if (cfg.lik.kind() == LikelihoodKind::Gaussian) lik["variance"] = cfg.lik.variance();
    experiments.push_back({{"likelihood", lik},
                           {"prior", {{"atoms", cfg.prior.atoms()}, {"weights", cfg.prior.weights()}}},
                           {"n", cfg.n},
                           {"mc_reps", cfg.mc_reps},
                           {"seed", cfg.base_seed},
                           {"threads", resolve_threads(cfg.threads)},
                           {"estimators", estimators},
                           {"dataset_checksums", rep.dataset_checksums},
                           {"wall_seconds", rep.wall_seconds}});
  }
  return json{{"experiments", experiments}}.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Figure data

namespace {

double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

/// log P(Z = z | theta) with X ~ Poisson(theta), Z | X ~ Binomial(X, 1 - tau).
double log_thinned_mass(std::int64_t z, double theta, double tau) {
  const double log_keep = std::log1p(-tau);
  const double log_drop = std::log(tau);
  const double zd = static_cast<double>(z);
  double total = -std::numeric_limits<double>::infinity();
  for (std::int64_t x = z;; ++x) {
    const double xd = static_cast<double>(x);
    // Poisson(x | theta) * Binomial(z | x, 1 - tau); the x! terms cancel.
    const double term = xd * std::log(theta) - theta - std::lgamma(zd + 1.0) -
                        std::lgamma(xd - zd + 1.0) + zd * log_keep + (xd - zd) * log_drop;
    total = log_add(total, term);
    // Successive terms shrink by theta * tau / (x + 1 - z); once that ratio is
    // below 1/2 the remaining tail is bounded by the current term.
    const double ratio = theta * tau / (xd + 1.0 - zd);
    if (ratio < 0.5 && term < total + std::log(1e-13)) break;
    if (x - z > 100000) throw NumericError("thinned Poisson summation did not terminate");
  }
  return total;
}

}  // namespace

double fission_true_mean(const PriorSpec& prior, const FissionConfig& fission, double t) {
  fission.validate();
  if (fission.scheme == FissionScheme::GaussianAdditive) {
    const auto f_lik = LikelihoodModel::gaussian(fission.sigma2 * (1.0 + fission.tau * fission.tau));
    try {
      return bayes_posterior_mean(prior, f_lik, t);
    } catch (const NumericError& e) {
      throw NumericError("true mean curve at t = " + format_double(t) + ": " + e.what());
    }
  }

  const double zr = t * (1.0 - fission.tau);
  const double z = std::round(zr);
  if (z < 0.0 || std::abs(zr - z) > 1e-9 * std::max(1.0, z)) {
    throw InputError("t = " + format_double(t) + " is not attainable by Poisson fission");
  }
  const auto zi = static_cast<std::int64_t>(z);
  std::vector<double> logs(prior.size());
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < prior.size(); ++k) {
    if (prior.weights()[k] <= 0.0) {
      logs[k] = -std::numeric_limits<double>::infinity();
      continue;
    }
    logs[k] = std::log(prior.weights()[k]) + log_thinned_mass(zi, prior.atoms()[k], fission.tau);
    max_log = std::max(max_log, logs[k]);
  }
  if (!std::isfinite(max_log)) {
    throw NumericError("true mean curve at t = " + format_double(t) + ": zero mixture mass");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < prior.size(); ++k) {
    const double r = std::exp(logs[k] - max_log);
    num += r * prior.atoms()[k];
    den += r;
  }
  return std::clamp(num / den, prior.min_support(), prior.max_support());
}

FigureData export_figure_data(const ExperimentConfig& cfg, double g_split, std::uint64_t seed,
                              std::size_t grid_points, Interpolation curve_mode) {
  if (cfg.n < 2) throw ConfigError("figure data needs n >= 2");
  cfg.lik.check_prior(cfg.prior);
  const auto fission = fission_for(cfg.lik, g_split);

  Dataset data = sample_dataset(cfg.prior, cfg.lik, cfg.n, derive_seed(seed, 0));
  AuroraDraw draw = aurora_draw(data.xs, fission, derive_seed(seed, 1));

  std::vector<double> ts;
  const auto [lo_it, hi_it] = std::minmax_element(
      draw.samples.begin(), draw.samples.end(),
      [](const FissionedSample& a, const FissionedSample& b) { return a.f < b.f; });
  if (fission.scheme == FissionScheme::GaussianAdditive) {
    if (grid_points < 2) throw ConfigError("curve needs at least two grid points");
    const double lo = lo_it->f;
    const double hi = hi_it->f;
    for (std::size_t j = 0; j < grid_points; ++j) {
      ts.push_back(lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(grid_points - 1));
    }
  } else {
    const auto z_max = static_cast<std::int64_t>(std::llround(hi_it->f * (1.0 - fission.tau)));
    for (std::int64_t z = 0; z <= z_max; ++z) ts.push_back(static_cast<double>(z) / (1.0 - fission.tau));
  }

  std::vector<CurvePoint> curve;
  curve.reserve(ts.size());
  for (double t : ts) {
    curve.push_back({t, fission_true_mean(cfg.prior, fission, t), draw.fit.predict(t, curve_mode)});
  }
  return FigureData{fission, std::move(data), std::move(draw.samples), std::move(draw.fit),
                    std::move(curve)};
}

void write_scatter_csv(std::ostream& os, std::span<const FissionedSample> scatter) {
  os << "f,g\n";
  for (const auto& s : scatter) os << format_double(s.f) << ',' << format_double(s.g) << '\n';
}

void write_curve_csv(std::ostream& os, std::span<const CurvePoint> curve) {
  os << "t,true_mean,fitted_mean\n";
  for (const auto& p : curve) {
    os << format_double(p.t) << ',' << format_double(p.true_mean) << ','
       << format_double(p.fitted_mean) << '\n';
  }
}

}  // namespace ebfission
