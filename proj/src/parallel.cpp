#include "parallel_for.hpp"

#include <atomic>

namespace lcmflow {

namespace {
std::atomic<int> g_threads{1};
}

void set_thread_count(int threads) { g_threads = threads < 1 ? 1 : threads; }

int thread_count() { return g_threads; }

} // namespace lcmflow
