#include "pslab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace pslab {

namespace {
std::atomic<int> g_threads{0};

int env_threads() {
  const char* v = std::getenv("PSLAB_THREADS");
  if (v == nullptr) return 0;
  try {
    const int t = std::stoi(v);
    return t > 0 ? t : 0;
  } catch (const std::exception&) {
    return 0;
  }
}
}  // namespace

void set_thread_count(int threads) { g_threads.store(std::max(threads, 0)); }

int thread_count() {
  if (const int t = g_threads.load(); t > 0) return t;
  if (const int t = env_threads(); t > 0) return t;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace pslab
