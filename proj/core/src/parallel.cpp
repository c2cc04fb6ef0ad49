#include "orbint/parallel.hpp"

#include <cstdlib>
#include <string>
#include <thread>

namespace orbint {

std::size_t worker_count() {
  const char* env = std::getenv("ORBINT_THREADS");
  long parsed = 0;
  if (env != nullptr && *env != '\0') {
    char* end = nullptr;
    parsed = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || parsed < 0) return 1;
  }
  if (parsed > 0) return static_cast<std::size_t>(parsed);
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void parallel_for_indexed(std::size_t n,
                          const std::function<void(std::size_t)>& body) {
  if (n == 0) return;
  std::size_t workers = worker_count();
  if (workers > n) workers = n;
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      // Contiguous block split keeps per-worker memory access local.
      std::size_t lo = n * w / workers;
      std::size_t hi = n * (w + 1) / workers;
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace orbint
