#include "ebfission/aurora.hpp"

#include <cmath>

#include "ebfission/error.hpp"

namespace ebfission {

void AuroraConfig::validate() const {
  fission.validate();
  if (fission_reps == 0) throw ConfigError("Aurora needs at least one fission rep");
}

std::uint64_t aurora_rep_seed(std::uint64_t base_seed, std::size_t rep) noexcept {
  return derive_seed(base_seed, rep);
}

AuroraDraw aurora_draw(std::span<const double> xs, const FissionConfig& fission, std::uint64_t seed) {
  if (xs.size() < 2) throw InputError("Aurora needs at least two observations");
  auto samples = fission_dataset(xs, fission, seed);

  std::vector<double> f(samples.size());
  std::vector<double> g(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    f[i] = samples[i].f;
    g[i] = samples[i].g;
  }
  auto fit = fit_isotonic(f, g);

  EstimateVector est(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) est[i] = fit(f[i]);
  return AuroraDraw{std::move(samples), std::move(fit), std::move(est)};
}

EstimateVector aurora_estimate(std::span<const double> xs, const AuroraConfig& cfg) {
  cfg.validate();
  if (xs.size() < 2) throw InputError("Aurora needs at least two observations");

  const std::size_t reps = cfg.fission_reps;
  std::vector<EstimateVector> per_rep(reps);
  parallel_for(reps, cfg.threads, [&](std::size_t r) {
    per_rep[r] = aurora_draw(xs, cfg.fission, aurora_rep_seed(cfg.base_seed, r)).estimates;
  });

  EstimateVector out(xs.size(), 0.0);
  for (const auto& est : per_rep) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += est[i];
  }
  for (double& v : out) v /= static_cast<double>(reps);
  return out;
}

double mse(std::span<const double> estimates, std::span<const double> thetas) {
  if (estimates.size() != thetas.size()) throw InputError("estimates and thetas differ in length");
  if (estimates.empty()) throw InputError("MSE of an empty vector is undefined");
  double sse = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const double d = estimates[i] - thetas[i];
    sse += d * d;
  }
  return sse / static_cast<double>(estimates.size());
}

}  // namespace ebfission
