// Deterministic parallel reduction for Monte-Carlo loops. Trials are split
// into fixed-size chunks; each chunk is accumulated sequentially by whichever
// worker picks it up, and the per-chunk partials are folded in chunk order.
// Totals are therefore bit-identical for any worker count.
#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace shiftseq {

inline constexpr std::uint64_t kMcChunkSize = 4096;

// accumulate(acc, trial_index) folds one trial into a chunk-local Acc;
// fold(total, acc) merges chunk partials, called in increasing chunk order.
template <typename Acc, typename AccumulateFn, typename FoldFn>
Acc mc_reduce(std::uint64_t trials, int workers, AccumulateFn&& accumulate,
              FoldFn&& fold) {
  if (trials == 0) return Acc{};
  const std::uint64_t n_chunks = (trials + kMcChunkSize - 1) / kMcChunkSize;
  std::vector<Acc> partials(n_chunks);

  auto run_chunk = [&](std::uint64_t c) {
    Acc acc{};
    const std::uint64_t lo = c * kMcChunkSize;
    const std::uint64_t hi = std::min(trials, lo + kMcChunkSize);
    for (std::uint64_t t = lo; t < hi; ++t) accumulate(acc, t);
    partials[c] = std::move(acc);
  };

  int n_workers = workers < 1 ? 1 : workers;
  if (static_cast<std::uint64_t>(n_workers) > n_chunks)
    n_workers = static_cast<int>(n_chunks);

  if (n_workers == 1) {
    for (std::uint64_t c = 0; c < n_chunks; ++c) run_chunk(c);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) {
      pool.emplace_back([&] {
        for (std::uint64_t c = next.fetch_add(1); c < n_chunks;
             c = next.fetch_add(1))
          run_chunk(c);
      });
    }
    for (auto& th : pool) th.join();
  }

  Acc total{};
  for (std::uint64_t c = 0; c < n_chunks; ++c) fold(total, partials[c]);
  return total;
}

// Runs fn(i) for i in [0, n); each index writes only its own output slot,
// so results are identical for any worker count.
template <typename Fn>
void parallel_for_index(std::uint64_t n, int workers, Fn&& fn) {
  int n_workers = workers < 1 ? 1 : workers;
  if (static_cast<std::uint64_t>(n_workers) > n)
    n_workers = static_cast<int>(n);
  if (n_workers <= 1) {
    for (std::uint64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (int w = 0; w < n_workers; ++w) {
    pool.emplace_back([&] {
      for (std::uint64_t i = next.fetch_add(1); i < n; i = next.fetch_add(1))
        fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace shiftseq
