#pragma once

#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace fdpboot {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// Static block partition of [0, count). Each index is visited exactly once
// and writes to its own slot, so results do not depend on the thread count.
inline void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  threads = resolve_threads(threads);
  if (threads > count) threads = count;
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::mutex err_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  const int base = count / threads;
  const int extra = count % threads;
  int begin = 0;
  for (int t = 0; t < threads; ++t) {
    const int len = base + (t < extra ? 1 : 0);
    const int end = begin + len;
    pool.emplace_back([&, begin, end] {
      try {
        for (int i = begin; i < end; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
    begin = end;
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace fdpboot
