#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace orbint {

/// Number of workers parallel_for_indexed will use. Reads ORBINT_THREADS
/// once per call: unset or "0" means one worker per hardware thread, any
/// positive integer caps the pool. Invalid text falls back to 1.
std::size_t worker_count();

/// Runs body(i) for i in [0, n), splitting the index range over workers.
/// Every result must be written to a slot indexed by i (never appended), so
/// output is independent of scheduling; with identical seeds and configs the
/// results are bitwise identical at any thread count.
void parallel_for_indexed(std::size_t n,
                          const std::function<void(std::size_t)>& body);

/// Convenience map: fills out[i] = fn(i) for i in [0, n).
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t n, Fn&& fn) {
  std::vector<T> out(n);
  parallel_for_indexed(n, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

}  // namespace orbint
