#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ebfission {

/// Discrete prior on strictly increasing atoms.
///
/// Weights must be nonnegative and sum to one (within 1e-12); zero weights are
/// allowed so that grid-based priors can be represented directly.
class PriorSpec {
 public:
  PriorSpec(std::vector<double> atoms, std::vector<double> weights);

  static PriorSpec uniform(std::vector<double> atoms);
  static PriorSpec point_mass(double atom);

  const std::vector<double>& atoms() const noexcept { return atoms_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return atoms_.size(); }

  double mean() const noexcept;
  double variance() const noexcept;

  /// Smallest and largest atoms carrying positive weight.
  double min_support() const noexcept;
  double max_support() const noexcept;

  friend bool operator==(const PriorSpec&, const PriorSpec&) = default;

 private:
  std::vector<double> atoms_;
  std::vector<double> weights_;
};

enum class LikelihoodKind { Gaussian, Poisson };

/// Observation model p(x | theta): Normal(theta, variance) or Poisson(theta).
class LikelihoodModel {
 public:
  static LikelihoodModel gaussian(double variance = 1.0);
  static LikelihoodModel poisson();

  LikelihoodKind kind() const noexcept { return kind_; }
  /// Gaussian noise variance; 0 for Poisson.
  double variance() const noexcept { return variance_; }
  std::string_view name() const noexcept;

  /// log p(x | theta). Poisson uses lgamma and returns -inf for theta <= 0
  /// unless x == 0 and theta == 0.
  double log_density(double x, double theta) const;

  /// Throws InputError if x is outside the support (Poisson: nonnegative integer).
  void check_observation(double x) const;

  /// Throws ConfigError if the prior cannot be used with this likelihood.
  void check_prior(const PriorSpec& prior) const;

  friend bool operator==(const LikelihoodModel&, const LikelihoodModel&) = default;

 private:
  LikelihoodModel(LikelihoodKind kind, double variance) : kind_(kind), variance_(variance) {}

  LikelihoodKind kind_;
  double variance_;
};

/// Parses "gaussian" / "poisson".
LikelihoodKind parse_likelihood_kind(std::string_view name);

struct Dataset {
  std::vector<double> thetas;
  std::vector<double> xs;
  std::uint64_t seed = 0;
};

/// theta_i iid from the prior, x_i | theta_i from the likelihood.
Dataset sample_dataset(const PriorSpec& prior, const LikelihoodModel& lik, std::size_t n,
                       std::uint64_t seed);

/// E[theta | x] under the prior, computed with log-sum-exp over the atoms.
/// Throws NumericError if every component has zero density at x.
double bayes_posterior_mean(const PriorSpec& prior, const LikelihoodModel& lik, double x);

/// Monte Carlo estimate of the Bayes risk E[(theta - E[theta | X])^2]:
/// the average over `reps` datasets of size n of the oracle's MSE.
double bayes_risk_mc(const PriorSpec& prior, const LikelihoodModel& lik, std::size_t n,
                     std::size_t reps, std::uint64_t seed);

/// Posterior mean at each x, sharing log-prior work across points.
std::vector<double> posterior_means(const PriorSpec& prior, const LikelihoodModel& lik,
                                    std::span<const double> xs);

}  // namespace ebfission
