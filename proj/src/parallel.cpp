#include "phasefilter/parallel.hpp"

#include <cstdlib>
#include <string>

namespace phasefilter {

namespace {
std::atomic<int> g_cap{0};
}

int default_threads() {
  if (const int cap = g_cap.load(); cap > 0) return cap;
  if (const char* env = std::getenv("PHASEFILTER_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void set_thread_cap(int threads) { g_cap = std::max(0, threads); }

}  // namespace phasefilter
