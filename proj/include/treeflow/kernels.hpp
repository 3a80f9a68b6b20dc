#pragma once

#include <cstddef>
#include <string_view>

// Dense floating-point inner loops used by the spectral solver and the Monte
// Carlo reductions. Each kernel has a scalar reference and an AVX2+FMA
// variant; `active()` picks one at runtime from CPUID. Setting the
// environment variable TREEFLOW_SCALAR=1 forces the scalar table.
//
// The two variants sum in different orders, so results agree to rounding,
// not bitwise. A given table is deterministic.
namespace treeflow::kernels {

struct Table {
  std::string_view name;
  double (*dot)(const double* x, const double* y, std::size_t n);
  double (*sum)(const double* x, std::size_t n);
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // y = A x for row-major A (rows x cols).
  void (*matvec)(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
  // Sum and sum of squares of (x - shift).
  void (*moments)(const double* x, std::size_t n, double shift, double* s1, double* s2);
};

const Table& scalar();
// Null when the CPU (or the build) lacks AVX2/FMA.
const Table* avx2();
const Table& active();

}  // namespace treeflow::kernels
