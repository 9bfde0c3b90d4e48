#include "bosegas/kernels.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bosegas {

double CsrMatrix::diagonal(std::size_t i) const {
  for (auto k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
    if (static_cast<std::size_t>(col[k]) == i) return val[k];
  }
  return 0.0;
}

namespace kernels {
namespace {

std::size_t block_count(std::size_t n) { return (n + kBlock - 1) / kBlock; }

double block_dot(const double* x, const double* y, std::size_t b, std::size_t n) {
  const std::size_t lo = b * kBlock, hi = std::min(n, lo + kBlock);
  double s = 0.0;
  for (std::size_t i = lo; i < hi; ++i) s += x[i] * y[i];
  return s;
}

}  // namespace

namespace serial {

void matvec(const CsrMatrix& A, const double* x, double* y) {
  for (std::size_t i = 0; i < A.n; ++i) {
    double s = 0.0;
    for (auto k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) s += A.val[k] * x[A.col[k]];
    y[i] = s;
  }
}

double dot(const double* x, const double* y, std::size_t n) {
  const std::size_t nb = block_count(n);
  double s = 0.0;
  for (std::size_t b = 0; b < nb; ++b) s += block_dot(x, y, b, n);
  return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double norm(const double* x, std::size_t n) { return std::sqrt(dot(x, x, n)); }

}  // namespace serial

namespace omp {

void matvec(const CsrMatrix& A, const double* x, double* y) {
  const auto n = static_cast<std::int64_t>(A.n);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (auto k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) s += A.val[k] * x[A.col[k]];
    y[i] = s;
  }
}

double dot(const double* x, const double* y, std::size_t n) {
  const auto nb = static_cast<std::int64_t>(block_count(n));
  std::vector<double> partial(static_cast<std::size_t>(nb));
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < nb; ++b) partial[b] = block_dot(x, y, static_cast<std::size_t>(b), n);
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const auto m = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < m; ++i) y[i] += a * x[i];
}

double norm(const double* x, std::size_t n) { return std::sqrt(dot(x, x, n)); }

}  // namespace omp

void set_threads(int threads) {
#ifdef _OPENMP
  if (threads >= 1) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace kernels
}  // namespace bosegas
