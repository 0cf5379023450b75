#ifndef APSQ_PARALLEL_HPP
#define APSQ_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace apsq {

/// Worker count; 0 resolves to the hardware concurrency.
inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Runs task(i) for every i in [0, count) on up to `threads` workers with
/// dynamic scheduling. Tasks write to disjoint slots; callers merge in index
/// order, so results never depend on scheduling. The first exception thrown
/// by any task is rethrown here.
template <typename Task>
void parallel_for(std::size_t count, unsigned threads, Task&& task) {
  unsigned workers = std::min<std::size_t>(resolve_threads(threads), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
  }
  if (error) std::rethrow_exception(error);
}

/// Splits [begin, end) into at most `chunks` contiguous ranges.
struct Range {
  std::uint64_t begin;
  std::uint64_t end;
};

inline std::vector<Range> split_range(std::uint64_t begin, std::uint64_t end,
                                      std::uint64_t chunk) {
  std::vector<Range> out;
  if (chunk == 0) chunk = 1;
  for (std::uint64_t b = begin; b < end;) {
    std::uint64_t e = end - b > chunk ? b + chunk : end;
    out.push_back({b, e});
    b = e;
  }
  return out;
}

}  // namespace apsq

#endif  // APSQ_PARALLEL_HPP
