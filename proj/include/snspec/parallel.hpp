#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace snspec {

/// Worker count: SNSPEC_THREADS if set to a positive integer, otherwise the
/// hardware concurrency.
inline unsigned thread_count() {
  if (const char* env = std::getenv("SNSPEC_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls fn(i) for i in [0, count) on up to `threads` workers. Each index is
/// handled exactly once; the first exception thrown is rethrown here.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn, unsigned threads = thread_count()) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < count; i += threads) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

/// Maps fn over items; results keep the input order regardless of scheduling.
template <class T, class Fn>
auto parallel_map(const std::vector<T>& items, Fn&& fn, unsigned threads = thread_count()) {
  using R = decltype(fn(items.front()));
  std::vector<std::optional<R>> slots(items.size());
  parallel_for(items.size(), [&](std::size_t i) { slots[i].emplace(fn(items[i])); }, threads);
  std::vector<R> out;
  out.reserve(items.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace snspec
