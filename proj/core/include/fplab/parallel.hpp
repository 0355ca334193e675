#pragma once

#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

namespace fplab {

// requested <= 0 means "use the hardware", clamped to a sane range.
int resolve_workers(int requested);

// Static chunking of [0, count) over `workers` threads. body(i) must touch
// only state owned by index i; results must not depend on chunk boundaries.
// The first exception thrown by any chunk is rethrown on the caller.
template <typename Body>
void parallel_for(std::int64_t count, int workers, Body&& body) {
  workers = resolve_workers(workers);
  if (count <= 0) return;
  if (workers > count) workers = static_cast<int>(count);

  if (workers <= 1) {
    for (std::int64_t i = 0; i < count; ++i) body(i);
    return;
  }

  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    const std::int64_t begin = count * w / workers;
    const std::int64_t end = count * (w + 1) / workers;
    pool.emplace_back([&, begin, end] {
      try {
        for (std::int64_t i = begin; i < end; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace fplab
