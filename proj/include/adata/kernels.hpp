// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0
//
// Data-parallel inner loops shared by pooling, clustering, projection and the
// controller. Every kernel has a scalar reference implementation; SIMD
// variants are selected at runtime from what the CPU reports.
//
//   dot               sum_i a[i] * b[i]
//   squared_distance  sum_i (a[i] - b[i])^2
//   axpy              y[i] += alpha * x[i]
//
// axpy is bitwise identical across backends (no FMA, lane-independent). The
// two reductions reassociate the sum, so SIMD results agree with the scalar
// reference to a few ulps of the accumulated magnitude, not bitwise.

#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace adata::kernels {

enum class Backend { Scalar, Avx2, Neon };

std::string_view backend_name(Backend backend);

/// True when the running CPU and this build both support `backend`.
bool backend_available(Backend backend);

/// Backend used by the span-based entry points below. Initialized on first use
/// to the widest available backend, or to the value of ADATA_SIMD
/// ("scalar", "avx2", "neon") when set.
Backend active_backend();

/// Throws adata::Error(InvalidArgument) if the backend is unavailable.
void set_backend(Backend backend);

double dot(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace avx2
#endif

#if defined(__aarch64__) || defined(_M_ARM64)
namespace neon {
double dot(const double* a, const double* b, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace neon
#endif

}  // namespace adata::kernels
