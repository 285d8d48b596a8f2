#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "ebfission/model.hpp"
#include "ebfission/random.hpp"

namespace ebfission {

enum class FissionScheme { GaussianAdditive, PoissonThinning };

FissionScheme parse_fission_scheme(std::string_view name);
std::string_view scheme_name(FissionScheme scheme) noexcept;

/// The scheme that matches an observation model.
FissionScheme scheme_for(const LikelihoodModel& lik) noexcept;

struct FissionConfig {
  FissionScheme scheme = FissionScheme::GaussianAdditive;
  double tau = 1.0;
  /// Noise variance for GaussianAdditive; ignored by PoissonThinning.
  double sigma2 = 1.0;

  static FissionConfig gaussian(double tau, double sigma2 = 1.0);
  static FissionConfig poisson(double tau);
  /// tau chosen so that g carries `g_fraction` of the Fisher information.
  static FissionConfig from_info_split(FissionScheme scheme, double g_fraction, double sigma2 = 1.0);

  /// Throws ConfigError unless tau > 0 (Gaussian) or tau in (0, 1) (Poisson).
  void validate() const;
};

/// One observation and its two synthetic replicates.
///
/// GaussianAdditive: x = (f + tau^2 g) / (1 + tau^2).
/// PoissonThinning:  x = (1 - tau) f + tau g, with (1 - tau) f and tau g integers.
struct FissionedSample {
  double x = 0.0;
  double f = 0.0;
  double g = 0.0;
};

/// Fission matched to the likelihood (noise variance taken from a Gaussian
/// model) with tau set from the information split.
FissionConfig fission_for(const LikelihoodModel& lik, double g_fraction);

/// f = x + tau z, g = x - z / tau for a given noise draw z.
FissionedSample split_gaussian(double x, double tau, double z);

/// f = z / (1 - tau), g = (x - z) / tau for a given thinned count z in [0, x].
FissionedSample split_poisson(std::int64_t x, double tau, std::int64_t z);

/// Draws z ~ Normal(0, sigma2) and splits x.
FissionedSample fission_gaussian(double x, double tau, double sigma2, Rng& rng);

/// Draws z ~ Binomial(x, 1 - tau) and splits x. Throws InputError unless x
/// is a nonnegative integer.
FissionedSample fission_poisson(double x, double tau, Rng& rng);

/// Gaussian: tau = sqrt(q / (1 - q)), since f carries 1/(1+tau^2) of the
/// information and g carries tau^2/(1+tau^2). Poisson: tau = q, since the
/// thinned count X - Z ~ Poisson(tau theta) carries a tau share.
double tau_from_info_split(FissionScheme scheme, double g_fraction);

/// Fraction of the Fisher information carried by g for a given tau.
double info_split_from_tau(FissionScheme scheme, double tau);

/// Applies the per-point fission with one RNG stream seeded from `seed`,
/// consumed in index order. Bad inputs raise InputError naming the 1-based row.
std::vector<FissionedSample> fission_dataset(std::span<const double> xs, const FissionConfig& cfg,
                                             std::uint64_t seed);

}  // namespace ebfission
