#include "ebfission/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>

#include "ebfission/csv.hpp"
#include "ebfission/error.hpp"

namespace ebfission {

EstimateVector mle_estimate(std::span<const double> xs) { return {xs.begin(), xs.end()}; }

EstimateVector oracle_bayes_estimate(std::span<const double> xs, const PriorSpec& prior,
                                     const LikelihoodModel& lik) {
  lik.check_prior(prior);
  return posterior_means(prior, lik, xs);
}

PriorSpec NpmleFit::prior() const {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<double> w(weights.size());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = weights[k] / total;
  return PriorSpec(grid, std::move(w));
}

void NpmleFit::write_csv(std::ostream& os) const {
  os << "grid,weight\n";
  for (std::size_t k = 0; k < grid.size(); ++k) {
    os << format_double(grid[k]) << ',' << format_double(weights[k]) << '\n';
  }
}

std::vector<double> npmle_grid(std::span<const double> xs, const LikelihoodModel& lik,
                               std::size_t grid_size) {
  if (xs.empty()) throw InputError("NPMLE needs at least one observation");
  if (grid_size < 2) throw ConfigError("NPMLE grid needs at least two points");
  const auto [min_it, max_it] = std::minmax_element(xs.begin(), xs.end());
  double lo = *min_it;
  double hi = *max_it;
  if (lik.kind() == LikelihoodKind::Gaussian) {
    if (hi == lo) {
      const double sd = std::sqrt(lik.variance());
      lo -= sd;
      hi += sd;
    }
  } else {
    lo = std::max(0.01, lo);
    hi = hi + 3.0 * std::sqrt(hi);
    if (hi <= lo) hi = lo + 1.0;
  }

  std::vector<double> grid(grid_size);
  const double step = (hi - lo) / static_cast<double>(grid_size - 1);
  for (std::size_t k = 0; k < grid_size; ++k) grid[k] = lo + step * static_cast<double>(k);
  grid.back() = hi;
  return grid;
}

NpmleFit fit_npmle_on_grid(std::span<const double> xs, const LikelihoodModel& lik,
                           std::vector<double> grid, const NpmleOptions& opts) {
  if (xs.empty()) throw InputError("NPMLE needs at least one observation");
  if (grid.size() < 2) throw ConfigError("NPMLE grid needs at least two points");
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] > grid[k - 1])) throw ConfigError("NPMLE grid must be strictly increasing");
  }
  if (opts.max_iter == 0) throw ConfigError("NPMLE max_iter must be at least 1");

  // Identical observations share a likelihood row.
  std::map<double, double> counts;
  for (double x : xs) {
    lik.check_observation(x);
    counts[x] += 1.0;
  }
  const std::size_t rows = counts.size();
  const std::size_t cols = grid.size();
  const auto n = static_cast<double>(xs.size());

  std::vector<double> mult;
  std::vector<double> row_log_max;
  std::vector<double> scaled(rows * cols);  // p(x_u | theta_k) / max_k p(x_u | theta_k)
  mult.reserve(rows);
  row_log_max.reserve(rows);
  {
    std::size_t u = 0;
    std::vector<double> logp(cols);
    for (const auto& [x, c] : counts) {
      double m = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < cols; ++k) {
        logp[k] = lik.log_density(x, grid[k]);
        m = std::max(m, logp[k]);
      }
      if (!std::isfinite(m)) throw NumericError("observation has zero likelihood on the whole grid");
      for (std::size_t k = 0; k < cols; ++k) scaled[u * cols + k] = std::exp(logp[k] - m);
      mult.push_back(c);
      row_log_max.push_back(m);
      ++u;
    }
  }

  std::vector<double> w(cols, 1.0 / static_cast<double>(cols));
  std::vector<double> marginal(rows);

  auto update_marginals = [&] {
    double ll = 0.0;
    for (std::size_t u = 0; u < rows; ++u) {
      const double* row = &scaled[u * cols];
      double s = 0.0;
      for (std::size_t k = 0; k < cols; ++k) s += w[k] * row[k];
      marginal[u] = s;
      ll += mult[u] * (std::log(s) + row_log_max[u]);
    }
    return ll / n;
  };

  NpmleFit fit;
  double ll = update_marginals();
  fit.loglik_trace.push_back(ll);

  std::vector<double> accum(cols);
  for (std::size_t it = 1; it <= opts.max_iter; ++it) {
    std::fill(accum.begin(), accum.end(), 0.0);
    for (std::size_t u = 0; u < rows; ++u) {
      const double* row = &scaled[u * cols];
      const double c = mult[u] / marginal[u];
      for (std::size_t k = 0; k < cols; ++k) accum[k] += c * row[k];
    }
    double total = 0.0;
    for (std::size_t k = 0; k < cols; ++k) {
      w[k] *= accum[k] / n;
      total += w[k];
    }
    for (double& wk : w) wk /= total;

    const double next = update_marginals();
    fit.loglik_trace.push_back(next);
    fit.iterations = it;
    const double gain = next - ll;
    ll = next;
    if (gain < opts.tol) {
      fit.converged = true;
      break;
    }
  }

  fit.grid = std::move(grid);
  fit.weights = std::move(w);
  fit.loglik = ll;
  return fit;
}

NpmleFit fit_npmle(std::span<const double> xs, const LikelihoodModel& lik, const NpmleOptions& opts) {
  return fit_npmle_on_grid(xs, lik, npmle_grid(xs, lik, opts.grid_size), opts);
}

EstimateVector npmle_estimate(std::span<const double> xs, const NpmleFit& fit,
                              const LikelihoodModel& lik) {
  return posterior_means(fit.prior(), lik, xs);
}

}  // namespace ebfission
