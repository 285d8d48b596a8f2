// Brute-force and closed-form reference computations used only by tests.
// Nothing here calls into the library code paths it is compared against.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

namespace ebfission::oracle {

/// Isotonic least squares by enumerating every split of the distinct sorted
/// x values into consecutive blocks. Each block is fitted by its weighted
/// mean; among the monotone candidates the one with the smallest SSE is the
/// projection. Returns the fitted value at each input point.
inline std::vector<double> isotonic_by_enumeration(std::span<const double> x,
                                                   std::span<const double> y,
                                                   std::span<const double> w) {
  std::vector<double> distinct(x.begin(), x.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  const std::size_t m = distinct.size();

  auto group_of = [&](double xv) {
    return static_cast<std::size_t>(std::lower_bound(distinct.begin(), distinct.end(), xv) -
                                    distinct.begin());
  };

  double best_sse = std::numeric_limits<double>::infinity();
  std::vector<double> best_levels(m);
  const std::uint32_t masks = 1u << (m - 1);
  for (std::uint32_t mask = 0; mask < masks; ++mask) {
    // Bit j set: a block boundary between distinct point j and j + 1.
    std::vector<std::size_t> block(m);
    std::size_t b = 0;
    for (std::size_t j = 0; j < m; ++j) {
      block[j] = b;
      if (j + 1 < m && (mask >> j & 1u)) ++b;
    }
    const std::size_t nblocks = b + 1;
    std::vector<double> wy(nblocks, 0.0);
    std::vector<double> ws(nblocks, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const auto blk = block[group_of(x[i])];
      wy[blk] += w[i] * y[i];
      ws[blk] += w[i];
    }
    std::vector<double> level(nblocks);
    for (std::size_t k = 0; k < nblocks; ++k) level[k] = wy[k] / ws[k];
    if (!std::is_sorted(level.begin(), level.end())) continue;
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - level[block[group_of(x[i])]];
      sse += w[i] * r * r;
    }
    if (sse < best_sse) {
      best_sse = sse;
      for (std::size_t j = 0; j < m; ++j) best_levels[j] = level[block[j]];
    }
  }

  std::vector<double> fitted(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) fitted[i] = best_levels[group_of(x[i])];
  return fitted;
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

inline double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

/// E[theta | a <= F < b] where F | theta ~ Normal(theta, s^2) and theta has
/// the given discrete prior.
inline double gaussian_bin_posterior_mean(std::span<const double> atoms, std::span<const double> weights,
                                          double s, double a, double b) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    const double lo = std::isinf(a) ? 0.0 : normal_cdf((a - atoms[k]) / s);
    const double hi = std::isinf(b) ? 1.0 : normal_cdf((b - atoms[k]) / s);
    num += weights[k] * atoms[k] * (hi - lo);
    den += weights[k] * (hi - lo);
  }
  return num / den;
}

/// E[theta | Z = z] where Z | theta ~ Poisson(rate * theta): the closed form
/// of binomial thinning.
inline double thinned_poisson_posterior_mean(std::span<const double> atoms,
                                             std::span<const double> weights, double rate,
                                             std::int64_t z) {
  std::vector<double> logs(atoms.size());
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    const double lam = rate * atoms[k];
    logs[k] = std::log(weights[k]) + static_cast<double>(z) * std::log(lam) - lam;
    mx = std::max(mx, logs[k]);
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    num += atoms[k] * std::exp(logs[k] - mx);
    den += std::exp(logs[k] - mx);
  }
  return num / den;
}

/// Density of F = X + tau Z at t given theta, with X ~ N(theta, sigma2) and
/// Z ~ N(0, sigma2) independent, by trapezoidal quadrature over X.
inline double gaussian_fission_density_by_quadrature(double t, double theta, double tau,
                                                     double sigma2) {
  const double sd = std::sqrt(sigma2);
  const double lo = theta - 12.0 * sd;
  const double hi = theta + 12.0 * sd;
  const int steps = 20000;
  const double h = (hi - lo) / steps;
  double total = 0.0;
  for (int j = 0; j <= steps; ++j) {
    const double xv = lo + h * j;
    const double fx = normal_pdf((xv - theta) / sd) / sd * normal_pdf((t - xv) / (tau * sd)) / (tau * sd);
    total += (j == 0 || j == steps) ? 0.5 * fx : fx;
  }
  return total * h;
}

struct BinCheck {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  double mean_g = 0.0;
  double se = 0.0;
  double expected = 0.0;

  double z_score() const { return se > 0 ? std::abs(mean_g - expected) / se : 0.0; }
};

inline std::vector<BinCheck> bin_g_by_f(std::span<const double> f, std::span<const double> g,
                                        std::span<const double> edges) {
  std::vector<BinCheck> bins(edges.size() - 1);
  std::vector<double> sum(bins.size(), 0.0);
  std::vector<double> sum_sq(bins.size(), 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto it = std::upper_bound(edges.begin(), edges.end(), f[i]);
    const auto b = static_cast<std::size_t>(it - edges.begin()) - 1;
    if (b >= bins.size()) continue;
    ++bins[b].count;
    sum[b] += g[i];
    sum_sq[b] += g[i] * g[i];
  }
  for (std::size_t b = 0; b < bins.size(); ++b) {
    bins[b].lo = edges[b];
    bins[b].hi = edges[b + 1];
    const auto c = static_cast<double>(bins[b].count);
    if (c < 2) continue;
    bins[b].mean_g = sum[b] / c;
    const double var = (sum_sq[b] - c * bins[b].mean_g * bins[b].mean_g) / (c - 1.0);
    bins[b].se = std::sqrt(std::max(var, 0.0) / c);
  }
  return bins;
}

/// Binned check of E[g | f] = E[theta | f] for Gaussian fission: `nbins`
/// equal-count bins on f, each compared to the exact bin posterior mean.
inline std::vector<BinCheck> gaussian_unbiasedness(std::span<const double> f, std::span<const double> g,
                                                   std::span<const double> atoms,
                                                   std::span<const double> weights, double tau,
                                                   double sigma2, std::size_t nbins) {
  std::vector<double> sorted(f.begin(), f.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> edges{-std::numeric_limits<double>::infinity()};
  for (std::size_t b = 1; b < nbins; ++b) edges.push_back(sorted[b * sorted.size() / nbins]);
  edges.push_back(std::numeric_limits<double>::infinity());
  auto bins = bin_g_by_f(f, g, edges);
  const double s = std::sqrt(sigma2 * (1.0 + tau * tau));
  for (auto& bin : bins) bin.expected = gaussian_bin_posterior_mean(atoms, weights, s, bin.lo, bin.hi);
  return bins;
}

/// Poisson fission: one bin per attained thinned count z = f (1 - tau) with
/// at least `min_count` points.
inline std::vector<BinCheck> poisson_unbiasedness(std::span<const double> f, std::span<const double> g,
                                                  std::span<const double> atoms,
                                                  std::span<const double> weights, double tau,
                                                  std::size_t min_count) {
  std::int64_t zmax = 0;
  for (double fv : f) zmax = std::max(zmax, static_cast<std::int64_t>(std::llround(fv * (1.0 - tau))));
  std::vector<BinCheck> out;
  for (std::int64_t z = 0; z <= zmax; ++z) {
    const double centre = static_cast<double>(z) / (1.0 - tau);
    const double half = 0.5 / (1.0 - tau);
    const std::vector<double> edges{centre - half, centre + half};
    auto bin = bin_g_by_f(f, g, edges).front();
    if (bin.count < min_count) continue;
    bin.expected = thinned_poisson_posterior_mean(atoms, weights, 1.0 - tau, z);
    out.push_back(bin);
  }
  return out;
}

/// Sample mean and variance (n - 1 denominator).
inline std::pair<double, double> mean_var(std::span<const double> v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, ss / (n - 1.0)};
}

}  // namespace ebfission::oracle
