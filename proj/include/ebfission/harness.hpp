#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ebfission/aurora.hpp"
#include "ebfission/baselines.hpp"
#include "ebfission/fission.hpp"
#include "ebfission/isotonic.hpp"
#include "ebfission/model.hpp"

namespace ebfission {

enum class EstimatorKind { Mle, Npmle, Aurora, OracleBayes };

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::Mle;
  /// Aurora: share of Fisher information given to g.
  double g_split = 0.14;
  /// Aurora: number of fission draws averaged.
  std::size_t fission_reps = 100;
  NpmleOptions npmle;

  static EstimatorSpec mle();
  static EstimatorSpec npmle_default(NpmleOptions opts = {});
  static EstimatorSpec aurora(double g_split, std::size_t fission_reps = 100);
  static EstimatorSpec oracle_bayes();

  /// Stable row name: mle, npmle, aurora_g0.04_r100, oracle_bayes.
  std::string label() const;
};

struct ExperimentConfig {
  PriorSpec prior = PriorSpec::uniform({1.0, 4.0, 7.0});
  LikelihoodModel lik = LikelihoodModel::gaussian(1.0);
  std::size_t n = 1000;
  std::size_t mc_reps = 100;
  std::vector<EstimatorSpec> estimators;
  std::uint64_t base_seed = 0;
  /// Worker threads over Monte Carlo reps; 0 = hardware concurrency.
  unsigned threads = 0;

  /// n = 1000, 100 reps, Unif{1,4,7}; MLE, NPMLE, Aurora at g-splits 0.04
  /// and 0.14 with 100 fission draws, oracle Bayes.
  static ExperimentConfig benchmark_defaults(LikelihoodModel lik, std::uint64_t seed = 0);

  void validate() const;
};

struct EstimatorSummary {
  std::string label;
  double mean_mse = 0.0;
  /// sd(per_rep_mse) / sqrt(mc_reps); 0 when mc_reps == 1.
  double se_mse = 0.0;
  std::vector<double> per_rep_mse;
  /// NPMLE only: reps whose EM hit max_iter.
  std::size_t unconverged = 0;
};

struct SimulationReport {
  ExperimentConfig config;
  std::vector<EstimatorSummary> estimators;
  /// FNV-1a checksum of each rep's dataset; every estimator in a rep sees it.
  std::vector<std::uint64_t> dataset_checksums;
  double wall_seconds = 0.0;

  const EstimatorSummary& find(const std::string& label) const;
};

/// Seed of the dataset drawn in Monte Carlo rep `rep`.
std::uint64_t dataset_seed(std::uint64_t base_seed, std::size_t rep) noexcept;
/// Seed handed to estimator `index` in rep `rep`.
std::uint64_t estimator_seed(std::uint64_t base_seed, std::size_t rep, std::size_t index) noexcept;

std::uint64_t dataset_checksum(const Dataset& data) noexcept;

/// Called once per finished rep: (rep index, dataset checksum). Serialized.
using ProgressFn = std::function<void(std::size_t, std::uint64_t)>;

/// Runs every estimator on each rep's dataset and aggregates MSE. Reps are
/// distributed over `cfg.threads` workers; aggregation is in rep order so
/// the report is independent of the thread count. A failing estimator
/// aborts the run with RuntimeError naming the rep and its seed.
SimulationReport run_experiment(const ExperimentConfig& cfg, const ProgressFn& progress = {});

/// `estimator,likelihood,mean_mse,se_mse,n,mc_reps,seed` with a header.
void write_table_csv(std::ostream& os, std::span<const SimulationReport> reports);

/// Pretty-printed JSON report: config echo, per-estimator aggregates and
/// per-rep MSEs, dataset checksums, wall-clock.
std::string report_json(std::span<const SimulationReport> reports);

/// E[theta | f_tau(X) = t] under the prior. Gaussian uses the exact
/// Normal(theta, sigma2 (1 + tau^2)) kernel of f; Poisson sums the binomial
/// thinning kernel over X with X | theta ~ Poisson(theta). For Poisson, t
/// must be a multiple of 1/(1 - tau).
double fission_true_mean(const PriorSpec& prior, const FissionConfig& fission, double t);

struct CurvePoint {
  double t = 0.0;
  double true_mean = 0.0;
  double fitted_mean = 0.0;
};

struct FigureData {
  FissionConfig fission;
  Dataset data;
  std::vector<FissionedSample> scatter;
  MonotoneStepFn fit;
  std::vector<CurvePoint> curve;
};

/// One dataset, one fission draw, the isotonic fit of g on f, and the true
/// mean curve. Gaussian curves use `grid_points` equispaced t over the range
/// of f; Poisson curves use every attainable t up to the largest observed f.
FigureData export_figure_data(const ExperimentConfig& cfg, double g_split, std::uint64_t seed,
                              std::size_t grid_points = 200,
                              Interpolation curve_mode = Interpolation::Step);

void write_scatter_csv(std::ostream& os, std::span<const FissionedSample> scatter);
void write_curve_csv(std::ostream& os, std::span<const CurvePoint> curve);

}  // namespace ebfission
