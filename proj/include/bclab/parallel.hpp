#ifndef BCLAB_PARALLEL_HPP
#define BCLAB_PARALLEL_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace bclab {

/// Worker cap: BCLAB_THREADS env var if set, else hardware concurrency.
int worker_count();

/// Override the worker cap programmatically (0 restores env / hardware).
void set_worker_threads(int n);

/// Runs body(block_index, begin, end) over [0, n) split into fixed-size
/// blocks. The block structure is independent of the worker count, so any
/// reduction that combines per-block results in index order is
/// deterministic under every scheduling.
void parallel_blocks(std::int64_t n, std::int64_t block_size,
                     const std::function<void(std::int64_t, std::int64_t, std::int64_t)>& body);

inline constexpr std::int64_t kDefaultBlock = 4096;

// Neumaier compensated summation.
struct Neumaier {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }

  double value() const { return sum + comp; }
};

/// Deterministic blocked reduction: sums per_item(i) componentwise over
/// i in [0, n). Blocks may run on any worker; partials combine in block
/// order with compensated summation.
template <int K, class F>
std::array<double, K> blocked_sums(std::int64_t n, F&& per_item) {
  const std::int64_t nblocks = n > 0 ? (n + kDefaultBlock - 1) / kDefaultBlock : 0;
  std::vector<std::array<double, K>> partial(static_cast<std::size_t>(nblocks));
  parallel_blocks(n, kDefaultBlock, [&](std::int64_t b, std::int64_t begin, std::int64_t end) {
    std::array<Neumaier, K> acc{};
    for (std::int64_t i = begin; i < end; ++i) {
      const std::array<double, K> v = per_item(i);
      for (int k = 0; k < K; ++k) acc[static_cast<std::size_t>(k)].add(v[static_cast<std::size_t>(k)]);
    }
    for (int k = 0; k < K; ++k)
      partial[static_cast<std::size_t>(b)][static_cast<std::size_t>(k)] =
          acc[static_cast<std::size_t>(k)].value();
  });
  std::array<Neumaier, K> total{};
  for (std::int64_t b = 0; b < nblocks; ++b)
    for (int k = 0; k < K; ++k)
      total[static_cast<std::size_t>(k)].add(partial[static_cast<std::size_t>(b)][static_cast<std::size_t>(k)]);
  std::array<double, K> out{};
  for (int k = 0; k < K; ++k) out[static_cast<std::size_t>(k)] = total[static_cast<std::size_t>(k)].value();
  return out;
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

/// Sample mean and standard error of per_item(i) over [0, n).
template <class F>
MeanSe mean_and_se(std::int64_t n, F&& per_item) {
  const auto s = blocked_sums<2>(n, [&](std::int64_t i) {
    const double v = per_item(i);
    return std::array<double, 2>{v, v * v};
  });
  MeanSe r;
  r.mean = s[0] / static_cast<double>(n);
  if (n > 1) {
    const double var = (s[1] - static_cast<double>(n) * r.mean * r.mean) / static_cast<double>(n - 1);
    r.se = std::sqrt(std::max(var, 0.0) / static_cast<double>(n));
  }
  return r;
}

}  // namespace bclab

#endif
