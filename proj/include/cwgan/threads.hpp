#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>

namespace cwgan {

// Internal parallelism cap. CWG_THREADS bounds the thread count; it never
// raises it above the hardware concurrency.
inline int max_threads() {
  static const int cached = [] {
    unsigned hw = std::thread::hardware_concurrency();
    int n = hw > 0 ? static_cast<int>(hw) : 1;
    if (const char* env = std::getenv("CWG_THREADS")) {
      char* end = nullptr;
      long v = std::strtol(env, &end, 10);
      if (end != env && v > 0) n = static_cast<int>(std::min<long>(v, n));
    }
    return n;
  }();
  return cached;
}

}  // namespace cwgan
