#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ebfission/fission.hpp"
#include "ebfission/isotonic.hpp"

namespace ebfission {

/// One estimate per observation.
using EstimateVector = std::vector<double>;

struct AuroraConfig {
  FissionConfig fission;
  /// Number of independent fission draws averaged together (R >= 1).
  std::size_t fission_reps = 100;
  std::uint64_t base_seed = 0;
  /// Worker threads for the fission reps; 0 = hardware concurrency. The
  /// result does not depend on this value.
  unsigned threads = 1;

  void validate() const;
};

/// Seed of fission rep r.
std::uint64_t aurora_rep_seed(std::uint64_t base_seed, std::size_t rep) noexcept;

/// A single fission draw: the replicates, the isotonic fit of g on f, and
/// the plug-in estimates m(f_i).
struct AuroraDraw {
  std::vector<FissionedSample> samples;
  MonotoneStepFn fit;
  EstimateVector estimates;
};

/// Fissions xs with `seed`, regresses g on f by isotonic regression with
/// unit weights, and evaluates the fit at each f_i.
AuroraDraw aurora_draw(std::span<const double> xs, const FissionConfig& fission, std::uint64_t seed);

/// Averages the per-observation estimates of R fission draws, summing in
/// rep order. Throws InputError when xs has fewer than two points.
EstimateVector aurora_estimate(std::span<const double> xs, const AuroraConfig& cfg);

/// (1/n) sum (est_i - theta_i)^2. Throws InputError on length mismatch.
double mse(std::span<const double> estimates, std::span<const double> thetas);

}  // namespace ebfission
