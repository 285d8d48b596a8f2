#include "ebfission/isotonic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "ebfission/csv.hpp"
#include "ebfission/error.hpp"

namespace ebfission {

MonotoneStepFn::MonotoneStepFn(std::vector<double> knots, std::vector<double> levels)
    : knots_(std::move(knots)), levels_(std::move(levels)) {
  if (knots_.empty() || knots_.size() != levels_.size()) {
    throw InputError("step function needs equal-length, nonempty knots and levels");
  }
  for (std::size_t k = 1; k < knots_.size(); ++k) {
    if (!(knots_[k] > knots_[k - 1])) throw InputError("knots must be strictly increasing");
    if (levels_[k] < levels_[k - 1]) throw InputError("levels must be nondecreasing");
  }
}

double MonotoneStepFn::predict(double x0, Interpolation mode) const noexcept {
  if (x0 <= knots_.front()) return levels_.front();
  if (x0 >= knots_.back()) return levels_.back();
  // First knot strictly greater than x0; x0 lies in [knots[hi-1], knots[hi]).
  const auto hi = static_cast<std::size_t>(
      std::upper_bound(knots_.begin(), knots_.end(), x0) - knots_.begin());
  const std::size_t lo = hi - 1;
  if (mode == Interpolation::Step) return levels_[lo];
  const double t = (x0 - knots_[lo]) / (knots_[hi] - knots_[lo]);
  return std::clamp(levels_[lo] + t * (levels_[hi] - levels_[lo]), levels_[lo], levels_[hi]);
}

void MonotoneStepFn::write_csv(std::ostream& os) const {
  os << "knot,level\n";
  for (std::size_t k = 0; k < knots_.size(); ++k) {
    os << format_double(knots_[k]) << ',' << format_double(levels_[k]) << '\n';
  }
}

namespace {

struct Block {
  double level;
  double weight;
  std::size_t count;  // distinct knots covered
};

}  // namespace

MonotoneStepFn fit_isotonic(std::span<const double> x, std::span<const double> y,
                            std::span<const double> w) {
  const std::size_t n = x.size();
  if (n == 0) throw InputError("isotonic regression needs at least one point");
  if (y.size() != n || w.size() != n) throw InputError("x, y and w must have equal length");
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isnan(x[i]) || std::isnan(y[i]) || std::isnan(w[i])) {
      throw InputError("NaN in isotonic regression input");
    }
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw InputError("non-finite isotonic regression input");
    }
    if (!(w[i] > 0.0) || !std::isfinite(w[i])) throw InputError("weights must be positive");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });

  // Pool ties in x.
  std::vector<double> knots;
  std::vector<double> means;
  std::vector<double> weights;
  knots.reserve(n);
  means.reserve(n);
  weights.reserve(n);
  for (std::size_t i = 0; i < n;) {
    const double xv = x[order[i]];
    double wy = 0.0;
    double ws = 0.0;
    std::size_t j = i;
    for (; j < n && x[order[j]] == xv; ++j) {
      wy += w[order[j]] * y[order[j]];
      ws += w[order[j]];
    }
    knots.push_back(xv);
    means.push_back(j - i == 1 ? y[order[i]] : wy / ws);
    weights.push_back(ws);
    i = j;
  }

  // Stack-based PAVA; adjacent blocks merge while the left level exceeds the right.
  std::vector<Block> stack;
  stack.reserve(knots.size());
  for (std::size_t k = 0; k < knots.size(); ++k) {
    Block cur{means[k], weights[k], 1};
    while (!stack.empty() && stack.back().level > cur.level) {
      const Block& prev = stack.back();
      const double wsum = prev.weight + cur.weight;
      cur = Block{(prev.weight * prev.level + cur.weight * cur.level) / wsum, wsum,
                  prev.count + cur.count};
      stack.pop_back();
    }
    stack.push_back(cur);
  }

  std::vector<double> levels;
  levels.reserve(knots.size());
  for (const auto& b : stack) levels.insert(levels.end(), b.count, b.level);
  return MonotoneStepFn(std::move(knots), std::move(levels));
}

MonotoneStepFn fit_isotonic(std::span<const double> x, std::span<const double> y) {
  const std::vector<double> w(x.size(), 1.0);
  return fit_isotonic(x, y, w);
}

}  // namespace ebfission
