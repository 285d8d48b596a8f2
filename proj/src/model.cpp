#include "ebfission/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "ebfission/error.hpp"
#include "ebfission/random.hpp"

namespace ebfission {

namespace {

constexpr double kWeightSumTolerance = 1e-12;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

// ---------------------------------------------------------------------------
// PriorSpec

PriorSpec::PriorSpec(std::vector<double> atoms, std::vector<double> weights)
    : atoms_(std::move(atoms)), weights_(std::move(weights)) {
  if (atoms_.empty()) throw ConfigError("prior must have at least one atom");
  if (atoms_.size() != weights_.size()) {
    throw ConfigError("prior atoms and weights differ in length");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < atoms_.size(); ++k) {
    if (!std::isfinite(atoms_[k])) throw ConfigError("prior atoms must be finite");
    if (k > 0 && !(atoms_[k] > atoms_[k - 1])) {
      throw ConfigError("prior atoms must be strictly increasing");
    }
    if (!(weights_[k] >= 0.0) || !std::isfinite(weights_[k])) {
      throw ConfigError("prior weights must be nonnegative");
    }
    total += weights_[k];
  }
  if (std::abs(total - 1.0) > kWeightSumTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "prior weights sum to " << total << ", expected 1";
    throw ConfigError(msg.str());
  }
}

PriorSpec PriorSpec::uniform(std::vector<double> atoms) {
  const auto k = atoms.size();
  if (k == 0) throw ConfigError("prior must have at least one atom");
  std::vector<double> weights(k, 1.0 / static_cast<double>(k));
  return PriorSpec(std::move(atoms), std::move(weights));
}

PriorSpec PriorSpec::point_mass(double atom) { return PriorSpec({atom}, {1.0}); }

double PriorSpec::mean() const noexcept {
  double m = 0.0;
  for (std::size_t k = 0; k < atoms_.size(); ++k) m += weights_[k] * atoms_[k];
  return m;
}

double PriorSpec::variance() const noexcept {
  const double m = mean();
  double v = 0.0;
  for (std::size_t k = 0; k < atoms_.size(); ++k) {
    v += weights_[k] * (atoms_[k] - m) * (atoms_[k] - m);
  }
  return v;
}

double PriorSpec::min_support() const noexcept {
  for (std::size_t k = 0; k < atoms_.size(); ++k) {
    if (weights_[k] > 0.0) return atoms_[k];
  }
  return atoms_.front();
}

double PriorSpec::max_support() const noexcept {
  for (std::size_t k = atoms_.size(); k-- > 0;) {
    if (weights_[k] > 0.0) return atoms_[k];
  }
  return atoms_.back();
}

// ---------------------------------------------------------------------------
// LikelihoodModel

LikelihoodModel LikelihoodModel::gaussian(double variance) {
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw ConfigError("Gaussian variance must be strictly positive");
  }
  return LikelihoodModel(LikelihoodKind::Gaussian, variance);
}

LikelihoodModel LikelihoodModel::poisson() { return LikelihoodModel(LikelihoodKind::Poisson, 0.0); }

std::string_view LikelihoodModel::name() const noexcept {
  return kind_ == LikelihoodKind::Gaussian ? "gaussian" : "poisson";
}

double LikelihoodModel::log_density(double x, double theta) const {
  if (kind_ == LikelihoodKind::Gaussian) {
    const double r = x - theta;
    return -0.5 * (r * r / variance_ + std::log(2.0 * std::numbers::pi * variance_));
  }
  if (theta <= 0.0) return (x == 0.0 && theta == 0.0) ? 0.0 : kNegInf;
  return x * std::log(theta) - theta - std::lgamma(x + 1.0);
}

void LikelihoodModel::check_observation(double x) const {
  if (!std::isfinite(x)) throw InputError("observation is not finite");
  if (kind_ == LikelihoodKind::Poisson && (x < 0.0 || std::floor(x) != x)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "Poisson observation must be a nonnegative integer, got " << x;
    throw InputError(msg.str());
  }
}

void LikelihoodModel::check_prior(const PriorSpec& prior) const {
  if (kind_ != LikelihoodKind::Poisson) return;
  for (double a : prior.atoms()) {
    if (!(a > 0.0)) throw ConfigError("Poisson prior atoms must be strictly positive");
  }
}

LikelihoodKind parse_likelihood_kind(std::string_view name) {
  if (name == "gaussian" || name == "normal") return LikelihoodKind::Gaussian;
  if (name == "poisson") return LikelihoodKind::Poisson;
  throw ConfigError("unknown likelihood '" + std::string(name) + "' (expected gaussian or poisson)");
}

// ---------------------------------------------------------------------------
// Sampling and posterior means

Dataset sample_dataset(const PriorSpec& prior, const LikelihoodModel& lik, std::size_t n,
                       std::uint64_t seed) {
  if (n == 0) throw ConfigError("dataset size must be at least 1");
  lik.check_prior(prior);

  Rng rng(seed);
  std::discrete_distribution<std::size_t> pick(prior.weights().begin(), prior.weights().end());
  std::normal_distribution<double> noise(0.0, std::sqrt(lik.variance() > 0 ? lik.variance() : 1.0));

  Dataset data;
  data.seed = seed;
  data.thetas.resize(n);
  data.xs.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double theta = prior.atoms()[pick(rng)];
    data.thetas[i] = theta;
    if (lik.kind() == LikelihoodKind::Gaussian) {
      data.xs[i] = theta + noise(rng);
    } else {
      data.xs[i] = static_cast<double>(std::poisson_distribution<std::int64_t>(theta)(rng));
    }
  }
  return data;
}

namespace {

double posterior_mean_impl(const PriorSpec& prior, const LikelihoodModel& lik,
                           std::span<const double> log_weights, double x) {
  const auto& atoms = prior.atoms();
  const std::size_t k = atoms.size();

  double max_log = kNegInf;
  for (std::size_t j = 0; j < k; ++j) {
    if (log_weights[j] == kNegInf) continue;
    max_log = std::max(max_log, log_weights[j] + lik.log_density(x, atoms[j]));
  }
  if (!std::isfinite(max_log)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "posterior mean undefined at x = " << x << ": every prior component has zero density";
    throw NumericError(msg.str());
  }

  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    if (log_weights[j] == kNegInf) continue;
    const double r = std::exp(log_weights[j] + lik.log_density(x, atoms[j]) - max_log);
    num += r * atoms[j];
    den += r;
  }
  const double value = num / den;
  if (!std::isfinite(value)) throw NumericError("posterior mean is not finite");
  return std::clamp(value, prior.min_support(), prior.max_support());
}

std::vector<double> log_weights_of(const PriorSpec& prior) {
  std::vector<double> lw(prior.size());
  for (std::size_t j = 0; j < lw.size(); ++j) {
    lw[j] = prior.weights()[j] > 0.0 ? std::log(prior.weights()[j]) : kNegInf;
  }
  return lw;
}

}  // namespace

double bayes_posterior_mean(const PriorSpec& prior, const LikelihoodModel& lik, double x) {
  lik.check_observation(x);
  const auto lw = log_weights_of(prior);
  return posterior_mean_impl(prior, lik, lw, x);
}

std::vector<double> posterior_means(const PriorSpec& prior, const LikelihoodModel& lik,
                                    std::span<const double> xs) {
  const auto lw = log_weights_of(prior);
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    lik.check_observation(xs[i]);
    out[i] = posterior_mean_impl(prior, lik, lw, xs[i]);
  }
  return out;
}

double bayes_risk_mc(const PriorSpec& prior, const LikelihoodModel& lik, std::size_t n,
                     std::size_t reps, std::uint64_t seed) {
  if (n == 0 || reps == 0) throw ConfigError("bayes_risk_mc needs n >= 1 and reps >= 1");
  double total = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    const auto data = sample_dataset(prior, lik, n, derive_seed(seed, r));
    const auto est = posterior_means(prior, lik, data.xs);
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) sse += (est[i] - data.thetas[i]) * (est[i] - data.thetas[i]);
    total += sse / static_cast<double>(n);
  }
  return total / static_cast<double>(reps);
}

}  // namespace ebfission
