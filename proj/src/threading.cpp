#include "repsim/threading.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace repsim {
namespace {

int read_env_limit() {
  const char* env = std::getenv("REPSIM_THREADS");
  int limit = omp_get_max_threads();
  if (env != nullptr) {
    try {
      int requested = std::stoi(env);
      if (requested >= 1 && requested < limit) limit = requested;
    } catch (...) {
      // Unparseable value: ignore and keep the runtime default.
    }
  }
  return limit;
}

int g_thread_limit = 0;  // 0 = not yet initialized

}  // namespace

int thread_limit() {
  if (g_thread_limit == 0) g_thread_limit = read_env_limit();
  return g_thread_limit;
}

void set_thread_limit(int threads) { g_thread_limit = threads >= 1 ? threads : 1; }

}  // namespace repsim
