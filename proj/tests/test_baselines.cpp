#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <vector>

#include "ebfission/baselines.hpp"
#include "ebfission/error.hpp"

using namespace ebfission;

namespace {

const PriorSpec kThreePoint = PriorSpec::uniform({1.0, 4.0, 7.0});

}  // namespace

TEST_CASE("mle_estimate is the identity") {
  const std::vector<double> xs{1, 2, 3};
  CHECK(mle_estimate(xs) == xs);
  CHECK(mle_estimate(std::vector<double>{}).empty());
}

TEST_CASE("oracle_bayes_estimate") {
  const std::vector<double> xs{-3.0, 0.5, 4.0, 9.0};
  const auto est = oracle_bayes_estimate(xs, PriorSpec::point_mass(2.0), LikelihoodModel::gaussian(1.0));
  for (double v : est) CHECK(v == 2.0);
  const auto e2 = oracle_bayes_estimate(xs, kThreePoint, LikelihoodModel::gaussian(1.0));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CHECK(e2[i] == bayes_posterior_mean(kThreePoint, LikelihoodModel::gaussian(1.0), xs[i]));
  }
  CHECK_THROWS_AS(oracle_bayes_estimate(std::vector<double>{1.5}, kThreePoint, LikelihoodModel::poisson()),
                  InputError);
}

TEST_CASE("npmle_grid rules") {
  const std::vector<double> xs{-1.0, 2.0, 5.0};
  const auto g = npmle_grid(xs, LikelihoodModel::gaussian(1.0), 7);
  CHECK(g.front() == -1.0);
  CHECK(g.back() == 5.0);
  CHECK(g.size() == 7);
  CHECK(g[1] == doctest::Approx(0.0));

  const std::vector<double> counts{0.0, 3.0, 16.0};
  const auto p = npmle_grid(counts, LikelihoodModel::poisson(), 5);
  CHECK(p.front() == 0.01);
  CHECK(p.back() == doctest::Approx(16.0 + 3.0 * 4.0));

  const std::vector<double> same(5, 2.0);
  const auto s = npmle_grid(same, LikelihoodModel::gaussian(4.0), 5);
  CHECK(s.front() == 0.0);
  CHECK(s.back() == 4.0);
  const std::vector<double> zeros(5, 0.0);
  const auto z = npmle_grid(zeros, LikelihoodModel::poisson(), 3);
  CHECK(z.front() == 0.01);
  CHECK(z.back() > z.front());

  CHECK_THROWS_AS(npmle_grid(xs, LikelihoodModel::gaussian(1.0), 1), ConfigError);
  CHECK_THROWS_AS(npmle_grid(std::vector<double>{}, LikelihoodModel::gaussian(1.0), 10), InputError);
}

TEST_CASE("NPMLE on identical observations matches the best single atom") {
  const double c = 1.3;
  const std::vector<double> xs(50, c);
  const auto lik = LikelihoodModel::gaussian(1.0);
  NpmleOptions opts;
  opts.grid_size = 11;
  opts.max_iter = 200000;
  opts.tol = 1e-14;
  const auto fit = fit_npmle(xs, lik, opts);

  // Brute force over single-atom priors on the same grid.
  double best = -std::numeric_limits<double>::infinity();
  std::size_t best_k = 0;
  for (std::size_t k = 0; k < fit.grid.size(); ++k) {
    const double r = c - fit.grid[k];
    const double ll = -0.5 * r * r - 0.5 * std::log(2.0 * std::numbers::pi);
    if (ll > best) {
      best = ll;
      best_k = k;
    }
  }
  CHECK(std::abs(fit.loglik - best) < 1e-6);
  const auto top = static_cast<std::size_t>(
      std::max_element(fit.weights.begin(), fit.weights.end()) - fit.weights.begin());
  CHECK(top == best_k);
  CHECK(fit.weights[top] > 0.9);
}

TEST_CASE("NPMLE fit invariants") {
  const auto lik = LikelihoodModel::gaussian(1.0);
  const auto data = sample_dataset(kThreePoint, lik, 400, 14);
  NpmleOptions opts;
  opts.grid_size = 80;
  opts.max_iter = 300;
  const auto fit = fit_npmle(data.xs, lik, opts);
  CHECK(fit.iterations <= opts.max_iter);
  CHECK(fit.loglik_trace.size() == fit.iterations + 1);
  CHECK(std::accumulate(fit.weights.begin(), fit.weights.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-10));
  for (double w : fit.weights) CHECK(w >= 0.0);
  for (std::size_t i = 1; i < fit.loglik_trace.size(); ++i) {
    CHECK(fit.loglik_trace[i] >= fit.loglik_trace[i - 1]);
  }
  CHECK(fit.loglik == fit.loglik_trace.back());

  // Deterministic from the uniform start.
  const auto again = fit_npmle(data.xs, lik, opts);
  CHECK(again.weights == fit.weights);
  CHECK(again.loglik_trace == fit.loglik_trace);

  const auto est = npmle_estimate(data.xs, fit, lik);
  std::vector<std::size_t> order(data.xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return data.xs[a] < data.xs[b]; });
  for (std::size_t k = 0; k < order.size(); ++k) {
    CHECK(est[order[k]] >= fit.grid.front());
    CHECK(est[order[k]] <= fit.grid.back());
    if (k > 0) CHECK(est[order[k]] >= est[order[k - 1]]);
  }

  std::ostringstream csv;
  fit.write_csv(csv);
  CHECK(csv.str().rfind("grid,weight\n", 0) == 0);
}

TEST_CASE("NPMLE: non-convergence is flagged, not thrown") {
  const auto lik = LikelihoodModel::poisson();
  const auto data = sample_dataset(kThreePoint, lik, 300, 4);
  NpmleOptions opts;
  opts.grid_size = 50;
  opts.max_iter = 3;
  opts.tol = 1e-14;
  const auto fit = fit_npmle(data.xs, lik, opts);
  CHECK_FALSE(fit.converged);
  CHECK(fit.iterations == 3);
}

TEST_CASE("npmle_estimate: all weight on one atom gives a constant") {
  NpmleFit fit;
  fit.grid = {1.0, 2.0, 3.0};
  fit.weights = {0.0, 1.0, 0.0};
  const std::vector<double> xs{-4.0, 0.0, 2.0, 11.0};
  for (double v : npmle_estimate(xs, fit, LikelihoodModel::gaussian(1.0))) CHECK(v == 2.0);
}

TEST_CASE("NPMLE recovers a single atom at n = 2000") {
  const auto lik = LikelihoodModel::gaussian(1.0);
  const auto data = sample_dataset(PriorSpec::point_mass(2.0), lik, 2000, 17);
  const auto fit = fit_npmle(data.xs, lik);
  CHECK(std::abs(fit.prior().mean() - 2.0) < 0.1);
}

TEST_CASE("NPMLE risk at benchmark scale" * doctest::timeout(600)) {
  for (const auto& lik : {LikelihoodModel::gaussian(1.0), LikelihoodModel::poisson()}) {
    const int reps = lik.kind() == LikelihoodKind::Gaussian ? 20 : 100;
    double risk = 0.0;
    for (int r = 0; r < reps; ++r) {
      const auto data = sample_dataset(kThreePoint, lik, 1000, 300 + r);
      risk += mse(npmle_estimate(data.xs, fit_npmle(data.xs, lik), lik), data.thetas);
    }
    risk /= reps;
    if (lik.kind() == LikelihoodKind::Gaussian) {
      // 20 datasets: per-rep sd is about 0.05, so the band is still several SEs wide.
      CHECK(std::abs(risk - 0.60) <= 0.05);
    } else {
      CHECK(std::abs(risk - 2.02) <= 0.10);
    }
  }
}
