#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace cfdyn {

/// Worker count: CFDYN_THREADS if set and positive, else hardware concurrency.
inline int default_threads() {
  if (const char* env = std::getenv("CFDYN_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

struct SweepOptions {
  int threads = 0;  // 0: default_threads()
  std::int64_t chunk = 4096;
};

/// Splits [begin, end) into fixed-size chunks, evaluates `work(lo, hi)` on a
/// pool of threads and folds the chunk results with `merge` in chunk order.
/// The result depends on the chunk size but never on the thread count.
template <class Acc, class Work, class Merge>
Acc chunked_reduce(std::int64_t begin, std::int64_t end, const SweepOptions& opt, Acc init, Work&& work,
                   Merge&& merge) {
  if (end <= begin) return init;
  const std::int64_t chunk = std::max<std::int64_t>(1, opt.chunk);
  const std::int64_t n_chunks = (end - begin + chunk - 1) / chunk;
  const int threads =
      static_cast<int>(std::min<std::int64_t>(opt.threads > 0 ? opt.threads : default_threads(), n_chunks));

  std::vector<std::optional<Acc>> parts(static_cast<std::size_t>(n_chunks));
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&]() {
    for (;;) {
      const std::int64_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      const std::int64_t lo = begin + c * chunk;
      const std::int64_t hi = std::min(end, lo + chunk);
      try {
        parts[static_cast<std::size_t>(c)].emplace(work(lo, hi));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n_chunks);
      }
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  Acc acc = std::move(init);
  for (auto& part : parts) merge(acc, *part);
  return acc;
}

}  // namespace cfdyn
