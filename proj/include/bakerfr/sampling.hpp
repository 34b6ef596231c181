// Deterministic ensemble runner for the float backend.
//
// The ensemble is cut into fixed-size shards; shard k draws from its own
// mt19937_64 seeded with (seed, k) and produces a partial result. Partials
// are merged in shard order, so output is independent of the thread count.
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

#include "bakerfr/core_maps.hpp"

namespace bakerfr {

struct EnsembleSpec {
  std::uint64_t size = 0;
  std::uint64_t seed = 0;
  std::uint64_t shard_size = 8192;
  unsigned threads = 0;  // 0: hardware concurrency
};

using Rng = std::mt19937_64;

inline Rng shard_rng(std::uint64_t seed, std::uint64_t shard) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(shard), static_cast<std::uint32_t>(shard >> 32)};
  return Rng(seq);
}

/// Uniform on [0,1) with 53 random bits; fixed algorithm across standard libraries.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline PhasePoint<double> uniform_point(Rng& rng) {
  const double x = uniform01(rng);
  return {x, uniform01(rng)};
}

/// Float iteration of an expanding map loses one or more mantissa bits per
/// step and collapses onto dyadic cycles; a tiny jitter in x re-injects them.
inline constexpr double kJitter = 0x1.0p-40;

inline PhasePoint<double> jitter(PhasePoint<double> q, Rng& rng) {
  q.x += (2.0 * uniform01(rng) - 1.0) * kJitter;
  q.x = std::clamp(q.x, 0.0, 1.0);
  q.y = std::clamp(q.y, 0.0, 1.0);
  return q;
}

template <class Map>
PhasePoint<double> noisy_step(const Map& map, const PhasePoint<double>& p, Rng& rng) {
  return jitter(map.apply(p), rng);
}

/// One noisy step in place; returns the region label of the point before the step.
template <class Map>
auto noisy_advance(const Map& map, PhasePoint<double>& p, Rng& rng) {
  const auto& b = map.branch_at(p);
  p = jitter(b.action()(p), rng);
  return b.label();
}

/// body(shard_index, count, rng) -> Partial; merge(Partial& into, const Partial& part).
template <class Partial, class Body, class Merge>
Partial run_sharded(const EnsembleSpec& spec, Body body, Merge merge, Partial init = Partial{}) {
  const std::uint64_t shard = std::max<std::uint64_t>(1, spec.shard_size);
  const std::uint64_t shards = (spec.size + shard - 1) / shard;
  std::vector<Partial> parts(shards);
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (std::uint64_t k = next++; k < shards; k = next++) {
      const std::uint64_t count = std::min(shard, spec.size - k * shard);
      Rng rng = shard_rng(spec.seed, k);
      parts[k] = body(k, count, rng);
    }
  };
  unsigned threads = spec.threads != 0 ? spec.threads : std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(shards, 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& p : parts) merge(init, p);
  return init;
}

/// Running sum and sum of squares; merged in a fixed order.
struct Moments {
  std::uint64_t count = 0;
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(double v) {
    ++count;
    sum += v;
    sum_sq += v * v;
  }
  void merge(const Moments& o) {
    count += o.count;
    sum += o.sum;
    sum_sq += o.sum_sq;
  }
  double mean() const { return count == 0 ? 0.0 : sum / static_cast<double>(count); }
  double variance() const {
    if (count < 2) return 0.0;
    const double m = mean();
    return std::max(0.0, (sum_sq - static_cast<double>(count) * m * m) / static_cast<double>(count - 1));
  }
  double stderr_of_mean() const { return count == 0 ? 0.0 : std::sqrt(variance() / static_cast<double>(count)); }
};

}  // namespace bakerfr
