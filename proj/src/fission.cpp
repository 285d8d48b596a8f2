#include "ebfission/fission.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "ebfission/error.hpp"

namespace ebfission {

FissionScheme parse_fission_scheme(std::string_view name) {
  if (name == "gaussian" || name == "normal") return FissionScheme::GaussianAdditive;
  if (name == "poisson") return FissionScheme::PoissonThinning;
  throw ConfigError("unknown fission scheme '" + std::string(name) + "' (expected gaussian or poisson)");
}

std::string_view scheme_name(FissionScheme scheme) noexcept {
  return scheme == FissionScheme::GaussianAdditive ? "gaussian" : "poisson";
}

FissionScheme scheme_for(const LikelihoodModel& lik) noexcept {
  return lik.kind() == LikelihoodKind::Gaussian ? FissionScheme::GaussianAdditive
                                                : FissionScheme::PoissonThinning;
}

FissionConfig FissionConfig::gaussian(double tau, double sigma2) {
  FissionConfig cfg{FissionScheme::GaussianAdditive, tau, sigma2};
  cfg.validate();
  return cfg;
}

FissionConfig FissionConfig::poisson(double tau) {
  FissionConfig cfg{FissionScheme::PoissonThinning, tau, 1.0};
  cfg.validate();
  return cfg;
}

FissionConfig FissionConfig::from_info_split(FissionScheme scheme, double g_fraction, double sigma2) {
  FissionConfig cfg{scheme, tau_from_info_split(scheme, g_fraction), sigma2};
  cfg.validate();
  return cfg;
}

void FissionConfig::validate() const {
  if (scheme == FissionScheme::GaussianAdditive) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("Gaussian fission needs tau > 0");
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
      throw ConfigError("Gaussian fission needs sigma2 > 0");
    }
  } else if (!(tau > 0.0 && tau < 1.0)) {
    throw ConfigError("Poisson fission needs tau in (0, 1)");
  }
}

FissionConfig fission_for(const LikelihoodModel& lik, double g_fraction) {
  if (lik.kind() == LikelihoodKind::Gaussian) {
    return FissionConfig::from_info_split(FissionScheme::GaussianAdditive, g_fraction, lik.variance());
  }
  return FissionConfig::from_info_split(FissionScheme::PoissonThinning, g_fraction);
}

FissionedSample split_gaussian(double x, double tau, double z) {
  return {x, x + tau * z, x - z / tau};
}

FissionedSample split_poisson(std::int64_t x, double tau, std::int64_t z) {
  if (z < 0 || z > x) throw InputError("thinned count must lie in [0, x]");
  return {static_cast<double>(x), static_cast<double>(z) / (1.0 - tau),
          static_cast<double>(x - z) / tau};
}

FissionedSample fission_gaussian(double x, double tau, double sigma2, Rng& rng) {
  const double z = std::normal_distribution<double>(0.0, std::sqrt(sigma2))(rng);
  return split_gaussian(x, tau, z);
}

FissionedSample fission_poisson(double x, double tau, Rng& rng) {
  if (!std::isfinite(x) || x < 0.0 || std::floor(x) != x) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "Poisson fission needs a nonnegative integer, got " << x;
    throw InputError(msg.str());
  }
  const auto count = static_cast<std::int64_t>(x);
  return split_poisson(count, tau, sample_binomial(count, 1.0 - tau, rng));
}

double tau_from_info_split(FissionScheme scheme, double g_fraction) {
  if (!(g_fraction > 0.0 && g_fraction < 1.0)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "information fraction outside (0,1): " << g_fraction;
    throw InputError(msg.str());
  }
  if (scheme == FissionScheme::GaussianAdditive) return std::sqrt(g_fraction / (1.0 - g_fraction));
  return g_fraction;
}

double info_split_from_tau(FissionScheme scheme, double tau) {
  if (scheme == FissionScheme::GaussianAdditive) return tau * tau / (1.0 + tau * tau);
  return tau;
}

std::vector<FissionedSample> fission_dataset(std::span<const double> xs, const FissionConfig& cfg,
                                             std::uint64_t seed) {
  cfg.validate();
  std::vector<FissionedSample> out;
  out.reserve(xs.size());
  Rng rng(seed);
  if (cfg.scheme == FissionScheme::GaussianAdditive) {
    std::normal_distribution<double> noise(0.0, std::sqrt(cfg.sigma2));
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!std::isfinite(xs[i])) throw InputError("row " + std::to_string(i + 1) + ": observation is not finite");
      out.push_back(split_gaussian(xs[i], cfg.tau, noise(rng)));
    }
  } else {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      try {
        out.push_back(fission_poisson(xs[i], cfg.tau, rng));
      } catch (const InputError& e) {
        throw InputError("row " + std::to_string(i + 1) + ": " + e.what());
      }
    }
  }
  return out;
}

}  // namespace ebfission
