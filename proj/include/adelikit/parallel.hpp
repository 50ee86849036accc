#pragma once
// Index-parallel loop; results are written by index so output order never
// depends on the thread count.

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace adelikit {

inline std::atomic<unsigned>& thread_setting() {
  static std::atomic<unsigned> n{1};
  return n;
}

/// 0 selects std::thread::hardware_concurrency().
inline void set_threads(unsigned n) {
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  thread_setting() = n;
}

template <class F>
void parallel_for(size_t count, F&& body) {
  unsigned t = std::min<size_t>(thread_setting().load(), count);
  if (t <= 1) {
    for (size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::exception_ptr> errs(t);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < t; ++w)
    pool.emplace_back([&, w] {
      try {
        for (size_t i; (i = next++) < count;) body(i);
      } catch (...) {
        errs[w] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

}  // namespace adelikit
