#include "conewave/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace conewave {

int worker_count() {
  int n = int(std::thread::hardware_concurrency());
  if (n <= 0) n = 1;
  n = std::min(n, 8);
  if (const char* env = std::getenv("CONEWAVE_THREADS")) {
    int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return n;
}

namespace {
thread_local bool g_inside_parallel = false;
}

void parallel_for(int n, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  const int workers = g_inside_parallel ? 1 : std::min(worker_count(), n);
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto body = [&] {
    g_inside_parallel = true;
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= n) break;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        break;
      }
    }
    g_inside_parallel = false;
  };
  std::vector<std::thread> threads;
  threads.reserve(workers - 1);
  for (int w = 1; w < workers; ++w) threads.emplace_back(body);
  body();
  for (auto& th : threads) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace conewave
