#pragma once
// Replication runner: rep r gets its own derived seed and writes into slot r,
// so results are identical for any thread count or scheduling order.

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "rfclt/rng.hpp"

namespace rfclt {

// Resolve a requested thread count: values >= 1 are taken as-is, anything
// else means "pick for me" (hardware concurrency, capped).
inline int resolve_threads(int requested) {
  if (requested >= 1) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  const unsigned capped = hw == 0 ? 1 : (hw > 8 ? 8 : hw);
  return static_cast<int>(capped);
}

// fn(rep_index, rep_seed) -> T, evaluated for rep_index in [0, reps).
template <typename T, typename Fn>
std::vector<T> run_replications(std::int64_t reps, std::uint64_t seed, int threads,
                                Fn&& fn) {
  std::vector<T> out(static_cast<std::size_t>(reps));
  const int nt = resolve_threads(threads);
  if (nt <= 1 || reps <= 1) {
    for (std::int64_t r = 0; r < reps; ++r) {
      out[static_cast<std::size_t>(r)] =
          fn(r, derive_seed(seed, static_cast<std::uint64_t>(r)));
    }
    return out;
  }
  std::atomic<std::int64_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nt));
  std::exception_ptr first_error;
  std::atomic<bool> failed{false};
  std::mutex err_mu;
  for (int t = 0; t < nt; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::int64_t r = next.fetch_add(1);
        if (r >= reps || failed.load()) return;
        try {
          out[static_cast<std::size_t>(r)] =
              fn(r, derive_seed(seed, static_cast<std::uint64_t>(r)));
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!failed.exchange(true)) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failed.load()) std::rethrow_exception(first_error);
  return out;
}

}  // namespace rfclt
