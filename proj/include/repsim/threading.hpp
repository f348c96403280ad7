#pragma once

namespace repsim {

/// Number of OpenMP threads the parallel kernels may use. Defaults to the
/// OpenMP runtime's maximum, capped by the REPSIM_THREADS environment
/// variable when set. Kernel results are independent of this value by
/// construction (fixed-order reductions), so it only affects speed.
int thread_limit();

/// Override the thread limit for this process (mainly for tests).
void set_thread_limit(int threads);

}  // namespace repsim
