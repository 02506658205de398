#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "eefluct/error.hpp"

namespace eefluct {

/// Runs `body(i)` for i in [0, n) on `workers` threads.
///
/// Each index is processed exactly once; callers write results into slot i so
/// the outcome does not depend on scheduling. After the first failure no new
/// indices are started, and an Error(RealizationFailure) naming the lowest
/// failed index is thrown once all threads have joined.
template <typename Body>
void parallel_for(std::size_t n, int workers, Body&& body) {
  const auto n_threads = static_cast<std::size_t>(std::clamp<long long>(
      workers, 1, static_cast<long long>(std::max<std::size_t>(n, 1))));

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::size_t n_failed = 0;
  std::size_t first_index = n;
  std::string first_message;

  auto worker = [&] {
    for (;;) {
      if (failed.load(std::memory_order_relaxed)) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        ++n_failed;
        if (i < first_index) {
          first_index = i;
          first_message = e.what();
        }
        failed.store(true);
      }
    }
  };

  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }

  if (n_failed > 0) {
    throw Error(ErrorKind::RealizationFailure,
                std::to_string(n_failed) + " realization(s) failed; realization " +
                    std::to_string(first_index) + ": " + first_message);
  }
}

}  // namespace eefluct
