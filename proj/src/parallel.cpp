#include "hz/parallel.hpp"

#include <atomic>

namespace hz {

namespace {
std::atomic<int> g_threads{1};
}

void set_thread_count(int n) { g_threads.store(std::max(1, n)); }

int thread_count() { return g_threads.load(); }

}  // namespace hz
