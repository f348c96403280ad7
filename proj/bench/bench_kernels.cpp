// Compares the OpenMP kernels against the serial reference implementations:
// wall time per kernel and the largest elementwise deviation.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <utility>
#include <vector>

#include "repsim/kernels.hpp"
#include "repsim/reference.hpp"
#include "repsim/synth.hpp"
#include "repsim/threading.hpp"

namespace {

using clock_type = std::chrono::steady_clock;

double time_ms(const std::function<void()>& fn, int repeats) {
  // One warmup, then best-of-N.
  fn();
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto start = clock_type::now();
    fn();
    const std::chrono::duration<double, std::milli> elapsed = clock_type::now() - start;
    best = std::min(best, elapsed.count());
  }
  return best;
}

void report(const char* name, Eigen::Index n, Eigen::Index p, double serial_ms,
            double parallel_ms, double max_diff) {
  std::printf("%-18s n=%-5td p=%-5td serial %9.2f ms   openmp %9.2f ms   "
              "speedup %5.2fx   max|diff| %.3e\n",
              name, n, p, serial_ms, parallel_ms, serial_ms / parallel_ms, max_diff);
}

}  // namespace

int main(int argc, char** argv) {
  const bool quick = argc > 1 && std::strcmp(argv[1], "--quick") == 0;
  const int repeats = quick ? 1 : 3;
  std::printf("threads: %d\n", repsim::thread_limit());

  const std::vector<std::pair<Eigen::Index, Eigen::Index>> sizes =
      quick ? std::vector<std::pair<Eigen::Index, Eigen::Index>>{{256, 128}}
            : std::vector<std::pair<Eigen::Index, Eigen::Index>>{
                  {256, 128}, {512, 256}, {1024, 256}};

  for (const auto& [n, p] : sizes) {
    const Eigen::MatrixXd x = repsim::gen_random(n, p, 7).data;
    const Eigen::MatrixXd y = repsim::gen_random(n, p, 8).data;

    Eigen::MatrixXd k_serial, k_par;
    double t_ref = time_ms([&] { k_serial = repsim::ref::gram_linear(x); }, repeats);
    double t_omp = time_ms([&] { k_par = repsim::kernels::gram_linear(x); }, repeats);
    report("gram_linear", n, p, t_ref, t_omp, (k_serial - k_par).cwiseAbs().maxCoeff());

    const double sigma =
        0.4 * repsim::kernels::median_of(repsim::kernels::pairwise_distances(x));
    Eigen::MatrixXd r_serial, r_par;
    t_ref = time_ms([&] { r_serial = repsim::ref::gram_rbf(x, sigma); }, repeats);
    t_omp = time_ms(
        [&] {
          r_par = repsim::kernels::rbf_from_distances(
              repsim::kernels::pairwise_distances(x), n, sigma);
        },
        repeats);
    report("gram_rbf", n, p, t_ref, t_omp, (r_serial - r_par).cwiseAbs().maxCoeff());

    Eigen::MatrixXd c_serial, c_par;
    t_ref = time_ms([&] { c_serial = repsim::ref::center_gram(k_serial); }, repeats);
    t_omp = time_ms(
        [&] {
          c_par = k_par;
          repsim::kernels::center_gram_inplace(c_par);
        },
        repeats);
    report("center_gram", n, p, t_ref, t_omp, (c_serial - c_par).cwiseAbs().maxCoeff());

    double trace_serial = 0, trace_par = 0;
    t_ref = time_ms([&] { trace_serial = repsim::ref::dot_trace(k_serial, c_serial); },
                    repeats);
    t_omp = time_ms([&] { trace_par = repsim::kernels::dot_trace(k_serial, c_serial); },
                    repeats);
    report("dot_trace", n, p, t_ref, t_omp, std::abs(trace_serial - trace_par));

    Eigen::MatrixXd cross_serial, cross_par;
    t_ref = time_ms([&] { cross_serial = repsim::ref::crossprod(x, y); }, repeats);
    t_omp = time_ms([&] { cross_par = repsim::kernels::crossprod(x, y); }, repeats);
    report("crossprod", n, p, t_ref, t_omp,
           (cross_serial - cross_par).cwiseAbs().maxCoeff());
  }
  return 0;
}
