#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace bosegas {

/// Compressed sparse row matrix, square.
struct CsrMatrix {
  std::size_t n = 0;
  std::vector<std::int64_t> row_ptr{0};
  std::vector<std::int32_t> col;
  std::vector<double> val;

  std::size_t nnz() const { return val.size(); }
  double diagonal(std::size_t i) const;
};

namespace kernels {

// Reductions use fixed blocks of kBlock entries summed in block order, so the
// serial and parallel variants return bitwise identical results for any thread
// count.
inline constexpr std::size_t kBlock = 4096;

namespace serial {
void matvec(const CsrMatrix& A, const double* x, double* y);
double dot(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
double norm(const double* x, std::size_t n);
}  // namespace serial

namespace omp {
void matvec(const CsrMatrix& A, const double* x, double* y);
double dot(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
double norm(const double* x, std::size_t n);
}  // namespace omp

/// Sets the OpenMP thread count; values < 1 keep the runtime default.
void set_threads(int threads);
int max_threads();

}  // namespace kernels
}  // namespace bosegas
