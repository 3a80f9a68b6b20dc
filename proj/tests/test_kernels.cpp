#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "treeflow/kernels.hpp"

using namespace treeflow;

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

// Reassociated sums of O(n) terms of size ~1 agree to a few ulps of the
// result, so compare relative to its magnitude.
constexpr double kTol = 1e-12;

double tol(double ref) { return kTol * std::max(1.0, std::abs(ref)); }

}  // namespace

TEST(Kernels, ScalarMatchesNaiveLoops) {
  const auto& k = kernels::scalar();
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 33u, 1000u}) {
    auto x = noise(n, n + 1);
    auto y = noise(n, n + 2);
    double dot = 0, sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      dot += x[i] * y[i];
      sum += x[i];
    }
    EXPECT_NEAR(k.dot(x.data(), y.data(), n), dot, kTol);
    EXPECT_NEAR(k.sum(x.data(), n), sum, kTol);
    double s1 = 0, s2 = 0;
    k.moments(x.data(), n, 0.25, &s1, &s2);
    double e1 = 0, e2 = 0;
    for (double v : x) {
      e1 += v - 0.25;
      e2 += (v - 0.25) * (v - 0.25);
    }
    EXPECT_NEAR(s1, e1, kTol);
    EXPECT_NEAR(s2, e2, kTol);
  }
}

TEST(Kernels, Avx2MatchesScalar) {
  const kernels::Table* fast = kernels::avx2();
  if (fast == nullptr) GTEST_SKIP() << "no AVX2 on this machine";
  const auto& ref = kernels::scalar();
  for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 8u, 15u, 16u, 17u, 255u, 4096u}) {
    auto x = noise(n, 10 * n + 1);
    auto y = noise(n, 10 * n + 2);
    double d = ref.dot(x.data(), y.data(), n);
    double s = ref.sum(x.data(), n);
    EXPECT_NEAR(fast->dot(x.data(), y.data(), n), d, tol(d)) << n;
    EXPECT_NEAR(fast->sum(x.data(), n), s, tol(s)) << n;
    auto ya = y, yb = y;
    fast->axpy(0.75, x.data(), ya.data(), n);
    ref.axpy(0.75, x.data(), yb.data(), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(ya[i], yb[i], 1e-15) << i;
    double a1, a2, b1, b2;
    fast->moments(x.data(), n, -0.5, &a1, &a2);
    ref.moments(x.data(), n, -0.5, &b1, &b2);
    EXPECT_NEAR(a1, b1, tol(b1));
    EXPECT_NEAR(a2, b2, tol(b2));
  }
  for (std::size_t rows : {1u, 3u, 8u, 13u}) {
    for (std::size_t cols : {1u, 4u, 7u, 13u}) {
      auto a = noise(rows * cols, rows * 100 + cols);
      auto x = noise(cols, cols);
      std::vector<double> ya(rows), yb(rows);
      fast->matvec(a.data(), rows, cols, x.data(), ya.data());
      ref.matvec(a.data(), rows, cols, x.data(), yb.data());
      for (std::size_t i = 0; i < rows; ++i) EXPECT_NEAR(ya[i], yb[i], kTol);
    }
  }
}

TEST(Kernels, ActiveIsOneOfTheTables) {
  const auto& a = kernels::active();
  const kernels::Table* fast = kernels::avx2();
  EXPECT_TRUE(&a == &kernels::scalar() || &a == fast);
  EXPECT_FALSE(a.name.empty());
}
