#include "bclab/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace bclab {

namespace {
std::atomic<int> g_worker_override{0};
}

void set_worker_threads(int n) { g_worker_override.store(n < 0 ? 0 : n); }

int worker_count() {
  const int forced = g_worker_override.load();
  if (forced > 0) return forced;
  if (const char* env = std::getenv("BCLAB_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n > 256 ? 256 : n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_blocks(std::int64_t n, std::int64_t block_size,
                     const std::function<void(std::int64_t, std::int64_t, std::int64_t)>& body) {
  if (n <= 0) return;
  const std::int64_t nblocks = (n + block_size - 1) / block_size;
  const int workers = static_cast<int>(std::min<std::int64_t>(worker_count(), nblocks));
  auto run_block = [&](std::int64_t b) {
    const std::int64_t begin = b * block_size;
    const std::int64_t end = std::min(n, begin + block_size);
    body(b, begin, end);
  };
  if (workers <= 1) {
    for (std::int64_t b = 0; b < nblocks; ++b) run_block(b);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::int64_t b = next.fetch_add(1);
        if (b >= nblocks || failed.load()) break;
        try {
          run_block(b);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          failed.store(true);
          break;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace bclab
