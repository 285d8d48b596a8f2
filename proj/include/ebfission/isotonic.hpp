#pragma once

#include <iosfwd>
#include <span>
#include <vector>

namespace ebfission {

enum class Interpolation {
  Step,    ///< right-continuous step: level of the nearest knot <= x0
  Linear,  ///< linear between knots; for rendering fitted curves
};

/// Nondecreasing step function fitted by isotonic regression. Constant
/// beyond the first and last knot.
class MonotoneStepFn {
 public:
  MonotoneStepFn(std::vector<double> knots, std::vector<double> levels);

  const std::vector<double>& knots() const noexcept { return knots_; }
  const std::vector<double>& levels() const noexcept { return levels_; }
  std::size_t size() const noexcept { return knots_.size(); }

  double predict(double x0, Interpolation mode = Interpolation::Step) const noexcept;
  double operator()(double x0) const noexcept { return predict(x0); }

  /// Writes `knot,level` rows with a header.
  void write_csv(std::ostream& os) const;

 private:
  std::vector<double> knots_;
  std::vector<double> levels_;
};

/// Weighted least-squares fit of y on x under a nondecreasing constraint.
/// Equal x values are pooled first (weighted-mean y, summed weight), then
/// pool-adjacent-violators runs over the distinct sorted points.
///
/// Throws InputError on empty input, length mismatch, non-finite values,
/// or nonpositive weights.
MonotoneStepFn fit_isotonic(std::span<const double> x, std::span<const double> y,
                            std::span<const double> w);

/// Unit weights.
MonotoneStepFn fit_isotonic(std::span<const double> x, std::span<const double> y);

}  // namespace ebfission
