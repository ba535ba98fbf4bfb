#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace enstro {

/// Outcome of a fan-out: results in input order, empty slots after a failure.
template <class T>
struct ParallelResults {
  std::vector<std::optional<T>> items;
  std::string error;  ///< first failure message, empty on success
  bool ok() const noexcept { return error.empty(); }
};

/// Evaluates fn(i) for i < n on up to jobs threads. The first exception stops
/// the hand-out of further indices; points already running finish.
template <class T, class Fn>
ParallelResults<T> parallel_map(std::size_t n, std::size_t jobs, Fn&& fn) {
  ParallelResults<T> out;
  out.items.resize(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex err_mutex;
  auto worker = [&] {
    for (;;) {
      if (failed.load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        out.items[i] = fn(i);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!failed.exchange(true)) out.error = "point " + std::to_string(i) + ": " + e.what();
        return;
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(n, 1));
  if (threads == 1) {
    worker();
    return out;
  }
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return out;
}

}  // namespace enstro
