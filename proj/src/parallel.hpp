// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 shearlab contributors

#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace shearlab::detail {

// Run fn(worker, item) over items, item i going to worker i % T. Each worker
// sees its items in increasing order, so per-worker accumulations are
// reproducible for a fixed thread count.
inline void parallel_items(std::size_t items, int threads,
                           const std::function<void(int, std::size_t)>& fn) {
  threads = std::max(1, std::min<int>(threads, static_cast<int>(std::max<std::size_t>(items, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < items; ++i) fn(0, i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = static_cast<std::size_t>(t); i < items; i += static_cast<std::size_t>(threads))
          fn(t, i);
      } catch (...) {
        errors[static_cast<std::size_t>(t)] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace shearlab::detail
