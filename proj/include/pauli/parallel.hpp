#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace pauli {

namespace detail {
inline std::atomic<unsigned>& thread_cap() {
  static std::atomic<unsigned> cap{1};
  return cap;
}
}  // namespace detail

/// Caps the number of worker threads used by parallel_for (default 1).
inline void set_max_threads(unsigned k) { detail::thread_cap() = std::max(1u, k); }
inline unsigned max_threads() { return detail::thread_cap(); }

/// Runs body(begin, end) over contiguous chunks of [0, count). Chunks are
/// disjoint, so any body that writes only its own indices produces results
/// independent of the thread count.
template <class Body>
void parallel_for(std::size_t count, Body&& body) {
  const std::size_t workers = std::min<std::size_t>(max_threads(), std::max<std::size_t>(count, 1));
  if (workers <= 1 || count < 2) {
    body(std::size_t{0}, count);
    return;
  }
  const std::size_t chunk = (count + workers - 1) / workers;
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t b = w * chunk;
    const std::size_t e = std::min(count, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&, w, b, e] {
      try {
        body(b, e);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);
}

}  // namespace pauli
