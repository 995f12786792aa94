#pragma once

// Data-parallel inner loops shared by the solver.
//
// Every kernel in frlc::kernels has a naive twin in frlc::kernels::serial that
// is kept as the reference for tests and the benchmark. Parallel kernels split
// work into fixed-size row/column blocks and never reduce across threads, so
// their output does not depend on the thread count.

#include "frlc/types.hpp"

namespace frlc::kernels {

// Number of OpenMP threads kernels will use (1 when built without OpenMP).
int max_threads();
void set_threads(int n);

Matrix matmul(const Matrix& A, const Matrix& B);     // A * B
Matrix matmul_tn(const Matrix& A, const Matrix& B);  // A^T * B

Vector matvec(const Matrix& K, const Vector& v);     // K * v
Vector matvec_t(const Matrix& K, const Vector& u);   // K^T * u

// (A .* A) * v without forming A .* A.
Vector hadamard_square_matvec(const Matrix& A, const Vector& v);

// prev .* exp(-step * grad)
Matrix gibbs(const Matrix& prev, const Matrix& grad, double step);

// Entry (i, j) = ||Z1_i - Z2_j|| (or its square).
Matrix pairwise_distance(const Matrix& Z1, const Matrix& Z2, bool squared);

namespace serial {

Matrix matmul(const Matrix& A, const Matrix& B);
Matrix matmul_tn(const Matrix& A, const Matrix& B);
Vector matvec(const Matrix& K, const Vector& v);
Vector matvec_t(const Matrix& K, const Vector& u);
Vector hadamard_square_matvec(const Matrix& A, const Vector& v);
Matrix gibbs(const Matrix& prev, const Matrix& grad, double step);
Matrix pairwise_distance(const Matrix& Z1, const Matrix& Z2, bool squared);

}  // namespace serial

}  // namespace frlc::kernels
