// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cstdlib>
#include <string>

#include "adata/error.hpp"
#include "adata/kernels.hpp"

namespace adata::kernels {

namespace {

struct KernelTable {
  Backend backend;
  double (*dot)(const double*, const double*, std::size_t);
  double (*squared_distance)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
};

constexpr KernelTable kScalarTable{Backend::Scalar, &scalar::dot, &scalar::squared_distance,
                                   &scalar::axpy};
#if defined(__x86_64__) || defined(_M_X64)
constexpr KernelTable kAvx2Table{Backend::Avx2, &avx2::dot, &avx2::squared_distance, &avx2::axpy};
#endif
#if defined(__aarch64__) || defined(_M_ARM64)
constexpr KernelTable kNeonTable{Backend::Neon, &neon::dot, &neon::squared_distance, &neon::axpy};
#endif

const KernelTable* table_for(Backend backend) {
  switch (backend) {
    case Backend::Scalar:
      return &kScalarTable;
    case Backend::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return &kAvx2Table;
#else
      return nullptr;
#endif
    case Backend::Neon:
#if defined(__aarch64__) || defined(_M_ARM64)
      return &kNeonTable;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

const KernelTable* initial_table() {
  if (const char* env = std::getenv("ADATA_SIMD")) {
    const std::string want(env);
    for (Backend b : {Backend::Scalar, Backend::Avx2, Backend::Neon}) {
      if (want == backend_name(b) && backend_available(b)) return table_for(b);
    }
  }
  if (backend_available(Backend::Avx2)) return table_for(Backend::Avx2);
  if (backend_available(Backend::Neon)) return table_for(Backend::Neon);
  return &kScalarTable;
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

inline const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

void require_same_size(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error("kernels", ErrorCode::DimensionMismatch,
                "operand lengths " + std::to_string(a) + " and " + std::to_string(b));
  }
}

}  // namespace

std::string_view backend_name(Backend backend) {
  switch (backend) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
  }
  return "unknown";
}

bool backend_available(Backend backend) {
  switch (backend) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::Neon:
#if defined(__aarch64__) || defined(_M_ARM64)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Backend active_backend() { return active().backend; }

void set_backend(Backend backend) {
  if (!backend_available(backend)) {
    throw Error("kernels", ErrorCode::InvalidArgument,
                "backend " + std::string(backend_name(backend)) + " unavailable on this CPU");
  }
  current().store(table_for(backend), std::memory_order_relaxed);
}

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size());
  return active().dot(a.data(), b.data(), a.size());
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size());
  return active().squared_distance(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  require_same_size(x.size(), y.size());
  active().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace adata::kernels
