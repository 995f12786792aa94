#include "frlc/kernels.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace frlc::kernels {

namespace {

// Fixed block width: the partition of work must not depend on the thread count.
constexpr Index kBlock = 64;

// Below this many multiply-adds the parallel region costs more than it saves.
constexpr double kParallelWork = 1 << 16;

Index block_count(Index n) { return (n + kBlock - 1) / kBlock; }

}  // namespace

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
  omp_set_num_threads(std::max(1, n));
#else
  (void)n;
#endif
}

Matrix matmul(const Matrix& A, const Matrix& B) {
  require_shape(A.cols() == B.rows(), "matmul inner dimensions differ");
  Matrix out(A.rows(), B.cols());
  const Index blocks = block_count(A.rows());
  const bool par = double(A.rows()) * A.cols() * B.cols() > kParallelWork;
#pragma omp parallel for schedule(static) if (par)
  for (Index blk = 0; blk < blocks; ++blk) {
    const Index r0 = blk * kBlock;
    const Index rows = std::min(kBlock, A.rows() - r0);
    out.middleRows(r0, rows).noalias() = A.middleRows(r0, rows) * B;
  }
  return out;
}

Matrix matmul_tn(const Matrix& A, const Matrix& B) {
  require_shape(A.rows() == B.rows(), "matmul_tn inner dimensions differ");
  Matrix out(A.cols(), B.cols());
  const Index blocks = block_count(A.cols());
  const bool par = double(A.rows()) * A.cols() * B.cols() > kParallelWork;
#pragma omp parallel for schedule(static) if (par)
  for (Index blk = 0; blk < blocks; ++blk) {
    const Index c0 = blk * kBlock;
    const Index cols = std::min(kBlock, A.cols() - c0);
    out.middleRows(c0, cols).noalias() = A.middleCols(c0, cols).transpose() * B;
  }
  return out;
}

Vector matvec(const Matrix& K, const Vector& v) {
  require_shape(K.cols() == v.size(), "matvec size mismatch");
  Vector out = Vector::Zero(K.rows());
  const bool par = double(K.rows()) * K.cols() > kParallelWork;
  const Index blocks = block_count(K.rows());
#pragma omp parallel for schedule(static) if (par)
  for (Index blk = 0; blk < blocks; ++blk) {
    const Index r0 = blk * kBlock;
    const Index r1 = std::min(K.rows(), r0 + kBlock);
    for (Index j = 0; j < K.cols(); ++j) {
      const double vj = v[j];
      for (Index i = r0; i < r1; ++i) out[i] += K(i, j) * vj;
    }
  }
  return out;
}

Vector matvec_t(const Matrix& K, const Vector& u) {
  require_shape(K.rows() == u.size(), "matvec_t size mismatch");
  Vector out(K.cols());
  const bool par = double(K.rows()) * K.cols() > kParallelWork;
#pragma omp parallel for schedule(static) if (par)
  for (Index j = 0; j < K.cols(); ++j) {
    double s = 0.0;
    for (Index i = 0; i < K.rows(); ++i) s += K(i, j) * u[i];
    out[j] = s;
  }
  return out;
}

Vector hadamard_square_matvec(const Matrix& A, const Vector& v) {
  require_shape(A.cols() == v.size(), "hadamard_square_matvec size mismatch");
  Vector out = Vector::Zero(A.rows());
  const bool par = double(A.rows()) * A.cols() > kParallelWork;
  const Index blocks = block_count(A.rows());
#pragma omp parallel for schedule(static) if (par)
  for (Index blk = 0; blk < blocks; ++blk) {
    const Index r0 = blk * kBlock;
    const Index r1 = std::min(A.rows(), r0 + kBlock);
    for (Index k = 0; k < A.cols(); ++k) {
      const double vk = v[k];
      for (Index i = r0; i < r1; ++i) out[i] += A(i, k) * A(i, k) * vk;
    }
  }
  return out;
}

Matrix gibbs(const Matrix& prev, const Matrix& grad, double step) {
  require_shape(prev.rows() == grad.rows() && prev.cols() == grad.cols(),
                "gibbs kernel shapes differ");
  Matrix out(prev.rows(), prev.cols());
  const Index total = prev.size();
  const double* p = prev.data();
  const double* g = grad.data();
  double* o = out.data();
  const bool par = double(total) * 16 > kParallelWork;
#pragma omp parallel for schedule(static) if (par)
  for (Index e = 0; e < total; ++e) o[e] = p[e] * std::exp(-step * g[e]);
  return out;
}

Matrix pairwise_distance(const Matrix& Z1, const Matrix& Z2, bool squared) {
  if (Z1.cols() != Z2.cols()) fail(ErrorKind::DimMismatch, "point dimensions differ");
  const Index n = Z1.rows();
  const Index m = Z2.rows();
  const Index d = Z1.cols();
  Matrix out(n, m);
  const bool par = double(n) * m * std::max<Index>(d, 1) > kParallelWork;
#pragma omp parallel for schedule(static) if (par)
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i < n; ++i) {
      double s = 0.0;
      for (Index k = 0; k < d; ++k) {
        const double diff = Z1(i, k) - Z2(j, k);
        s += diff * diff;
      }
      out(i, j) = squared ? s : std::sqrt(s);
    }
  }
  return out;
}

namespace serial {

Matrix matmul(const Matrix& A, const Matrix& B) {
  require_shape(A.cols() == B.rows(), "matmul inner dimensions differ");
  Matrix out = Matrix::Zero(A.rows(), B.cols());
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < B.cols(); ++j) {
      double s = 0.0;
      for (Index k = 0; k < A.cols(); ++k) s += A(i, k) * B(k, j);
      out(i, j) = s;
    }
  return out;
}

Matrix matmul_tn(const Matrix& A, const Matrix& B) {
  require_shape(A.rows() == B.rows(), "matmul_tn inner dimensions differ");
  Matrix out = Matrix::Zero(A.cols(), B.cols());
  for (Index i = 0; i < A.cols(); ++i)
    for (Index j = 0; j < B.cols(); ++j) {
      double s = 0.0;
      for (Index k = 0; k < A.rows(); ++k) s += A(k, i) * B(k, j);
      out(i, j) = s;
    }
  return out;
}

Vector matvec(const Matrix& K, const Vector& v) {
  require_shape(K.cols() == v.size(), "matvec size mismatch");
  Vector out(K.rows());
  for (Index i = 0; i < K.rows(); ++i) {
    double s = 0.0;
    for (Index j = 0; j < K.cols(); ++j) s += K(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

Vector matvec_t(const Matrix& K, const Vector& u) {
  require_shape(K.rows() == u.size(), "matvec_t size mismatch");
  Vector out(K.cols());
  for (Index j = 0; j < K.cols(); ++j) {
    double s = 0.0;
    for (Index i = 0; i < K.rows(); ++i) s += K(i, j) * u[i];
    out[j] = s;
  }
  return out;
}

Vector hadamard_square_matvec(const Matrix& A, const Vector& v) {
  require_shape(A.cols() == v.size(), "hadamard_square_matvec size mismatch");
  Vector out(A.rows());
  for (Index i = 0; i < A.rows(); ++i) {
    double s = 0.0;
    for (Index k = 0; k < A.cols(); ++k) s += A(i, k) * A(i, k) * v[k];
    out[i] = s;
  }
  return out;
}

Matrix gibbs(const Matrix& prev, const Matrix& grad, double step) {
  require_shape(prev.rows() == grad.rows() && prev.cols() == grad.cols(),
                "gibbs kernel shapes differ");
  Matrix out(prev.rows(), prev.cols());
  for (Index i = 0; i < prev.rows(); ++i)
    for (Index j = 0; j < prev.cols(); ++j) out(i, j) = prev(i, j) * std::exp(-step * grad(i, j));
  return out;
}

Matrix pairwise_distance(const Matrix& Z1, const Matrix& Z2, bool squared) {
  if (Z1.cols() != Z2.cols()) fail(ErrorKind::DimMismatch, "point dimensions differ");
  Matrix out(Z1.rows(), Z2.rows());
  for (Index i = 0; i < Z1.rows(); ++i)
    for (Index j = 0; j < Z2.rows(); ++j) {
      const double s = (Z1.row(i) - Z2.row(j)).squaredNorm();
      out(i, j) = squared ? s : std::sqrt(s);
    }
  return out;
}

}  // namespace serial

}  // namespace frlc::kernels
