#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace ebfission {

/// Engine used for every random stream in the library.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer; bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t z) noexcept;

/// Child seed for stream `index` under `base`. Used for per-replicate and
/// per-estimator streams so that work can be scheduled in any order.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept;
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index, std::uint64_t salt) noexcept;

/// Binomial(trials, p) draw. Inverse-CDF for trials <= 64, the standard
/// library's rejection sampler above that.
std::int64_t sample_binomial(std::int64_t trials, double p, Rng& rng);

/// Runs `body(i)` for i in [0, count) on up to `threads` workers. Each index
/// is executed exactly once; callers write results into slot i so the
/// outcome does not depend on scheduling. The first exception is rethrown.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body);

/// `requested` if nonzero, otherwise the hardware concurrency (at least 1).
unsigned resolve_threads(unsigned requested) noexcept;

}  // namespace ebfission
