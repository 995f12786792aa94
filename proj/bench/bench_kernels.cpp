// Serial reference vs. OpenMP kernels: wall time and max deviation.
#include "frlc/kernels.hpp"
#include "frlc/rng.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>

using namespace frlc;

namespace {

Matrix random_matrix(Index r, Index c, Rng& rng) {
  Matrix M(r, c);
  for (Index j = 0; j < c; ++j)
    for (Index i = 0; i < r; ++i) M(i, j) = rng.uniform();
  return M;
}

double time_ms(const std::function<void()>& f, int reps) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int k = 0; k < reps; ++k) f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

template <class A, class B>
void row(const char* name, A serial, B parallel, int reps) {
  decltype(serial()) s, p;
  const double ts = time_ms([&] { s = serial(); }, reps);
  const double tp = time_ms([&] { p = parallel(); }, reps);
  std::printf("%-24s %10.3f %10.3f %8.2fx %12.3e\n", name, ts, tp, ts / tp, (s - p).cwiseAbs().maxCoeff());
}

}  // namespace

int main(int argc, char** argv) {
  const Index n = argc > 1 ? std::atol(argv[1]) : 2000;
  const Index r = argc > 2 ? std::atol(argv[2]) : 100;
  const int reps = argc > 3 ? std::atoi(argv[3]) : 3;
  Rng rng(1);
  const Matrix C = random_matrix(n, n, rng);
  const Matrix Q = random_matrix(n, r, rng);
  const Matrix Z1 = random_matrix(n, 2, rng), Z2 = random_matrix(n, 2, rng);
  const Vector v = random_matrix(n, 1, rng);

  std::printf("n=%ld r=%ld threads=%d\n", long(n), long(r), kernels::max_threads());
  std::printf("%-24s %10s %10s %9s %12s\n", "kernel", "serial_ms", "omp_ms", "speedup", "max_abs_diff");
  row("matmul C*Q", [&] { return kernels::serial::matmul(C, Q); }, [&] { return kernels::matmul(C, Q); }, reps);
  row("matmul_tn Q^T*C", [&] { return kernels::serial::matmul_tn(Q, C); }, [&] { return kernels::matmul_tn(Q, C); },
      reps);
  row("matvec", [&] { return kernels::serial::matvec(C, v); }, [&] { return kernels::matvec(C, v); }, reps);
  row("matvec_t", [&] { return kernels::serial::matvec_t(C, v); }, [&] { return kernels::matvec_t(C, v); }, reps);
  row("hadamard_square_matvec", [&] { return kernels::serial::hadamard_square_matvec(C, v); },
      [&] { return kernels::hadamard_square_matvec(C, v); }, reps);
  row("gibbs", [&] { return kernels::serial::gibbs(Q, Q, 0.5); }, [&] { return kernels::gibbs(Q, Q, 0.5); }, reps);
  row("pairwise_distance", [&] { return kernels::serial::pairwise_distance(Z1, Z2, false); },
      [&] { return kernels::pairwise_distance(Z1, Z2, false); }, reps);
  return 0;
}
