#include "fairlift/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

namespace fairlift {

ChunkPlan plan_chunks(std::size_t row_count, int worker_count, std::size_t target_chunk_rows) {
  if (worker_count < 1) {
    raise(Errc::InvalidArgument, "workerCount must be >= 1");
  }
  if (target_chunk_rows < 1) {
    raise(Errc::InvalidArgument, "targetChunkRows must be >= 1");
  }
  ChunkPlan plan;
  plan.worker_count = worker_count;
  plan.bounds.reserve((row_count + target_chunk_rows - 1) / target_chunk_rows);
  for (std::size_t begin = 0; begin < row_count; begin += target_chunk_rows) {
    plan.bounds.emplace_back(begin, std::min(begin + target_chunk_rows, row_count));
  }
  return plan;
}

std::uint64_t splitmix64(std::uint64_t state) {
  std::uint64_t z = state + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
  return splitmix64(splitmix64(base) ^ splitmix64(~salt));
}

std::vector<std::size_t> sample_indices(std::size_t population, std::size_t n,
                                        std::uint64_t seed) {
  std::vector<std::size_t> picked;
  if (n >= population) {
    picked.resize(population);
    for (std::size_t i = 0; i < population; ++i) {
      picked[i] = i;
    }
    return picked;
  }
  // Floyd's algorithm: uniform without replacement in O(n) memory.
  SeededRng rng(seed);
  std::unordered_set<std::size_t> chosen;
  chosen.reserve(n * 2);
  for (std::size_t j = population - n; j < population; ++j) {
    std::size_t t = static_cast<std::size_t>(rng.bounded(j + 1));
    if (!chosen.insert(t).second) {
      chosen.insert(j);
    }
  }
  picked.assign(chosen.begin(), chosen.end());
  std::sort(picked.begin(), picked.end());
  return picked;
}

SampledRows sample(const JoinedView& view, std::size_t n, std::uint64_t seed) {
  if (n < 1) {
    raise(Errc::InvalidArgument, "sample size must be >= 1");
  }
  SampledRows out;
  out.seed = seed;
  out.requested = n;
  auto rows = sample_indices(view.row_count(), n, seed);
  out.actual = rows.size();
  out.rows.reserve(rows.size());
  const bool labeled = view.has_labels();
  const bool scored = view.has_scores();
  auto labels = labeled ? view.labels() : std::span<const std::int64_t>{};
  auto scores = scored ? view.scores() : std::span<const double>{};
  auto groups = view.group_ids();
  for (auto r : rows) {
    out.rows.push_back({labeled ? labels[r] : -1,
                        scored ? scores[r] : std::numeric_limits<double>::quiet_NaN(), groups[r]});
  }
  return out;
}

const JoinedView& CachedHandle::view() const {
  if (view_ == nullptr) {
    raise(Errc::InvalidArgument, "cache handle is invalid");
  }
  return *view_;
}

CachedHandle CacheManager::put(JoinedView view) {
  const std::size_t bytes = view.byte_size();
  if (budget_ != 0 && used_ + bytes > budget_) {
    raise(Errc::OutOfMemoryBudget, "caching " + std::to_string(bytes) + " bytes exceeds budget " +
                                       std::to_string(budget_) + " (used " +
                                       std::to_string(used_) + ")");
  }
  CachedHandle handle;
  handle.view_ = std::make_shared<const JoinedView>(std::move(view));
  handle.bytes_ = bytes;
  used_ += bytes;
  return handle;
}

void CacheManager::invalidate(CachedHandle& handle) {
  if (handle.view_ != nullptr) {
    used_ -= std::min<std::uint64_t>(used_, handle.bytes_);
    handle.view_.reset();
    handle.bytes_ = 0;
  }
}

}  // namespace fairlift
