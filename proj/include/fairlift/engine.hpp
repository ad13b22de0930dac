#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include "fairlift/error.hpp"
#include "fairlift/join.hpp"

namespace fairlift {

struct EngineOptions {
  int worker_count = default_worker_count();
  std::size_t target_chunk_rows = 262144;
  std::uint64_t cache_budget_bytes = 0;  // 0 = unlimited
  std::uint64_t seed = 0;

  static int default_worker_count() {
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
  }

  bool operator==(const EngineOptions&) const = default;
};

/// Disjoint, ordered half-open row intervals covering [0, rowCount).
struct ChunkPlan {
  std::vector<std::pair<std::size_t, std::size_t>> bounds;
  int worker_count = 1;

  std::size_t chunk_count() const { return bounds.size(); }
};

ChunkPlan plan_chunks(std::size_t row_count, int worker_count, std::size_t target_chunk_rows);

/// Chunk-parallel map-reduce with a deterministic reduction contract: the
/// result equals the left fold of per-chunk accumulators in ascending chunk
/// order, regardless of how many workers ran or how chunks were scheduled.
/// map_fn(begin, end, chunk_index) -> Acc; combine(acc, acc) -> acc must be
/// associative with `identity`. The first map failure (by chunk index) is
/// rethrown.
template <typename Acc, typename MapFn, typename CombineFn>
Acc map_reduce(const ChunkPlan& plan, MapFn&& map_fn, CombineFn&& combine, Acc identity) {
  const std::size_t n = plan.bounds.size();
  if (n == 0) {
    return identity;
  }
  std::vector<std::optional<Acc>> partials(n);
  std::vector<std::exception_ptr> failures(n);
  std::atomic<std::size_t> next{0};

  auto run_worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1, std::memory_order_relaxed)) < n;) {
      try {
        partials[i].emplace(map_fn(plan.bounds[i].first, plan.bounds[i].second, i));
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };

  const int workers = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(std::max(plan.worker_count, 1)), n));
  if (workers <= 1) {
    run_worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back(run_worker);
    }
    for (auto& t : pool) {
      t.join();
    }
  }

  for (const auto& failure : failures) {
    if (failure) {
      std::rethrow_exception(failure);
    }
  }
  Acc acc = std::move(identity);
  for (auto& partial : partials) {
    acc = combine(std::move(acc), std::move(*partial));
  }
  return acc;
}

/// Exact accumulator for sums of doubles in [0,1]: values are quantized to
/// multiples of 2^-64 and summed in 128-bit integers. Integer addition is
/// associative, so totals are bit-identical for every chunking and worker
/// count; the quantization error is below n * 2^-64.
class FixedPointSum {
 public:
  FixedPointSum() = default;

  void add(double value) { acc_ += quantize(value); }
  FixedPointSum& operator+=(const FixedPointSum& other) {
    acc_ += other.acc_;
    return *this;
  }

  double value() const { return static_cast<double>(acc_) * kScale; }

  static __int128 quantize(double value) {
    return static_cast<__int128>(value * 18446744073709551616.0);  // 2^64
  }

 private:
  static constexpr double kScale = 5.421010862427522e-20;  // 2^-64
  __int128 acc_ = 0;
};

// --- seeded sampling -------------------------------------------------------

std::uint64_t splitmix64(std::uint64_t state);

/// Independent stream seed for a (base, salt) pair.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt);

/// splitmix64 stream generator. Used instead of std::mt19937_64 with
/// std::uniform_int_distribution so that draws are identical on every
/// standard library, which the determinism contracts depend on.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : state_(splitmix64(seed)) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Unbiased draw from [0, bound); bound must be nonzero.
  std::uint64_t bounded(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      std::uint64_t r = next();
      if (r >= threshold) {
        return r % bound;
      }
    }
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

/// Uniform sample of n indices from [0, population) without replacement,
/// returned in ascending order (so n == population yields the identity).
/// Deterministic per seed; the draw sequence is fixed by this library, not
/// by the platform's distribution implementation.
std::vector<std::size_t> sample_indices(std::size_t population, std::size_t n, std::uint64_t seed);

struct SampleRow {
  std::int64_t label;  // -1 when the view has no labels
  double score;        // NaN when the view has no scores
  std::int32_t group;
};

struct SampledRows {
  std::vector<SampleRow> rows;
  std::uint64_t seed = 0;
  std::size_t requested = 0;
  std::size_t actual = 0;
};

/// Uniform without-replacement sample of view rows; the whole dataset (in
/// original order) when n >= rowCount.
SampledRows sample(const JoinedView& view, std::size_t n, std::uint64_t seed);

// --- caching ----------------------------------------------------------------

class CacheManager;

class CachedHandle {
 public:
  CachedHandle() = default;

  bool valid() const { return view_ != nullptr; }
  const JoinedView& view() const;
  std::size_t bytes() const { return bytes_; }

 private:
  friend class CacheManager;
  std::shared_ptr<const JoinedView> view_;
  std::size_t bytes_ = 0;
};

/// Holds materialized views against a byte budget. Insertion beyond the
/// budget throws OutOfMemoryBudget; invalidation is explicit.
class CacheManager {
 public:
  explicit CacheManager(std::uint64_t budget_bytes = 0) : budget_(budget_bytes) {}

  CachedHandle put(JoinedView view);
  void invalidate(CachedHandle& handle);

  std::uint64_t budget() const { return budget_; }
  std::uint64_t used() const { return used_; }

 private:
  std::uint64_t budget_ = 0;
  std::uint64_t used_ = 0;
};

}  // namespace fairlift
