#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace guidefill {

// Worker count used by parallel_for; 0 means hardware concurrency.
void set_worker_count(unsigned n);
unsigned worker_count();

// Runs body(k) for k in [0, n) over contiguous chunks. Bodies must write only
// to disjoint slots; results are then independent of the thread count.
template <typename Body>
void parallel_for(std::size_t n, Body&& body, std::size_t min_chunk = 256) {
  const std::size_t workers =
      std::min<std::size_t>(worker_count(), (n + min_chunk - 1) / std::max<std::size_t>(min_chunk, 1));
  if (workers <= 1) {
    for (std::size_t k = 0; k < n; ++k) body(k);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        for (std::size_t k = lo; k < hi; ++k) body(k);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace guidefill
