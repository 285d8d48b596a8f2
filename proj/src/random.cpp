#include "ebfission/random.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "ebfission/error.hpp"

namespace ebfission {

std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
  return mix64(mix64(base) ^ (index * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index, std::uint64_t salt) noexcept {
  return derive_seed(derive_seed(base, index), salt);
}

namespace {

std::int64_t binomial_inverse_cdf(std::int64_t trials, double p, Rng& rng) {
  // Walks the pmf from k = 0; p <= 0.5 here so q^trials does not underflow for trials <= 64.
  const double q = 1.0 - p;
  const double ratio = p / q;
  double pmf = std::pow(q, static_cast<double>(trials));
  double cdf = pmf;
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  std::int64_t k = 0;
  while (u > cdf && k < trials) {
    pmf *= ratio * static_cast<double>(trials - k) / static_cast<double>(k + 1);
    ++k;
    cdf += pmf;
  }
  return k;
}

}  // namespace

std::int64_t sample_binomial(std::int64_t trials, double p, Rng& rng) {
  if (trials < 0) throw InputError("binomial trials must be nonnegative");
  if (!(p >= 0.0 && p <= 1.0)) throw InputError("binomial probability must lie in [0, 1]");
  if (trials == 0 || p == 0.0) return 0;
  if (p == 1.0) return trials;
  if (trials > 64) {
    return std::binomial_distribution<std::int64_t>(trials, p)(rng);
  }
  if (p > 0.5) return trials - binomial_inverse_cdf(trials, 1.0 - p, rng);
  return binomial_inverse_cdf(trials, p, rng);
}

unsigned resolve_threads(unsigned requested) noexcept {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body) {
  const auto workers = static_cast<std::size_t>(std::min<std::size_t>(resolve_threads(threads), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace ebfission
