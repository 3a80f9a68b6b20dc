#include "treeflow/kernels.hpp"

namespace treeflow::kernels {

namespace {

double dot(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

double sum(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void matvec(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot(a + r * cols, x, cols);
}

void moments(const double* x, std::size_t n, double shift, double* s1, double* s2) {
  double a = 0.0;
  double b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = x[i] - shift;
    a += d;
    b += d * d;
  }
  *s1 = a;
  *s2 = b;
}

}  // namespace

const Table& scalar() {
  static const Table t{"scalar", dot, sum, axpy, matvec, moments};
  return t;
}

}  // namespace treeflow::kernels
