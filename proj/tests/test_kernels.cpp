// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <vector>

#include "adata/error.hpp"
#include "adata/kernels.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace adata;
namespace k = adata::kernels;

namespace {

double scale_of(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] * b[i]) + a[i] * a[i] + b[i] * b[i];
  return s;
}

struct BackendGuard {
  k::Backend saved = k::active_backend();
  ~BackendGuard() { k::set_backend(saved); }
};

}  // namespace

TEST_CASE("scalar reference kernels on hand-checked values") {
  const std::vector<double> a = {1, 2, 3};
  const std::vector<double> b = {4, -5, 6};
  CHECK(k::scalar::dot(a.data(), b.data(), 3) == 12.0);
  CHECK(k::scalar::squared_distance(a.data(), b.data(), 3) == 9.0 + 49.0 + 9.0);
  std::vector<double> y = b;
  k::scalar::axpy(2.0, a.data(), y.data(), 3);
  CHECK(y == std::vector<double>{6, -1, 12});
}

TEST_CASE("simd kernels match the scalar reference for every length including tails") {
  for (auto backend : {k::Backend::Avx2, k::Backend::Neon}) {
    if (!k::backend_available(backend)) continue;
    CAPTURE(k::backend_name(backend));
    Rng rng(99);
    for (std::size_t n = 0; n <= 67; ++n) {
      const auto a = testing::random_vector(rng, n, -3, 3);
      const auto b = testing::random_vector(rng, n, -3, 3);
      const double tol = 1e-14 * (1.0 + scale_of(a, b));
      double d = 0.0, s = 0.0;
      std::vector<double> y = b;
      std::vector<double> y_ref = b;
#if defined(__x86_64__)
      if (backend == k::Backend::Avx2) {
        d = k::avx2::dot(a.data(), b.data(), n);
        s = k::avx2::squared_distance(a.data(), b.data(), n);
        k::avx2::axpy(0.37, a.data(), y.data(), n);
      }
#elif defined(__aarch64__)
      if (backend == k::Backend::Neon) {
        d = k::neon::dot(a.data(), b.data(), n);
        s = k::neon::squared_distance(a.data(), b.data(), n);
        k::neon::axpy(0.37, a.data(), y.data(), n);
      }
#endif
      k::scalar::axpy(0.37, a.data(), y_ref.data(), n);
      CHECK(std::abs(d - k::scalar::dot(a.data(), b.data(), n)) <= tol);
      CHECK(std::abs(s - k::scalar::squared_distance(a.data(), b.data(), n)) <= tol);
      // axpy has no reassociation, so it is bitwise.
      CHECK(y == y_ref);
    }
  }
}

TEST_CASE("dispatch can be forced to scalar and back") {
  BackendGuard guard;
  k::set_backend(k::Backend::Scalar);
  CHECK(k::active_backend() == k::Backend::Scalar);
  const std::vector<double> a = {1, 2, 3, 4, 5};
  CHECK(k::dot(a, a) == 55.0);
  if (!k::backend_available(k::Backend::Neon)) {
    CHECK_THROWS_AS(k::set_backend(k::Backend::Neon), Error);
  }
}

TEST_CASE("span kernels reject mismatched sizes") {
  const std::vector<double> a = {1, 2};
  const std::vector<double> b = {1, 2, 3};
  std::vector<double> y = {0, 0, 0};
  CHECK_THROWS_AS(k::dot(a, b), Error);
  CHECK_THROWS_AS(k::squared_distance(a, b), Error);
  CHECK_THROWS_AS(k::axpy(1.0, a, y), Error);
}
