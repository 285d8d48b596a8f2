#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "ebfission/aurora.hpp"
#include "ebfission/model.hpp"

namespace ebfission {

/// theta_i = x_i.
EstimateVector mle_estimate(std::span<const double> xs);

/// E[theta | x_i] under the true prior.
EstimateVector oracle_bayes_estimate(std::span<const double> xs, const PriorSpec& prior,
                                     const LikelihoodModel& lik);

struct NpmleOptions {
  std::size_t grid_size = 300;
  std::size_t max_iter = 2000;
  /// EM stops once the average log-likelihood improves by less than this.
  double tol = 1e-8;
};

/// Grid-based Kiefer-Wolfowitz NPMLE fitted by EM.
struct NpmleFit {
  std::vector<double> grid;
  std::vector<double> weights;
  /// Final average log marginal likelihood.
  double loglik = 0.0;
  /// EM updates performed.
  std::size_t iterations = 0;
  bool converged = false;
  /// Average log-likelihood at the uniform start and after every update.
  std::vector<double> loglik_trace;

  /// The fitted mixing distribution; zero-weight grid points are kept.
  PriorSpec prior() const;

  /// Writes `grid,weight` rows with a header.
  void write_csv(std::ostream& os) const;
};

/// Equispaced grid: [min x, max x] for Gaussian (widened to min x +- sigma
/// when all observations coincide), [max(0.01, min x), max x + 3 sqrt(max x)]
/// for Poisson.
std::vector<double> npmle_grid(std::span<const double> xs, const LikelihoodModel& lik,
                               std::size_t grid_size);

/// EM from uniform weights on a caller-supplied strictly increasing grid.
NpmleFit fit_npmle_on_grid(std::span<const double> xs, const LikelihoodModel& lik,
                           std::vector<double> grid, const NpmleOptions& opts = {});

NpmleFit fit_npmle(std::span<const double> xs, const LikelihoodModel& lik,
                   const NpmleOptions& opts = {});

/// Posterior mean under the fitted grid prior.
EstimateVector npmle_estimate(std::span<const double> xs, const NpmleFit& fit,
                              const LikelihoodModel& lik);

}  // namespace ebfission
