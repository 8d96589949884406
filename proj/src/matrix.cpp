// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0

#include "adata/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adata/error.hpp"
#include "adata/kernels.hpp"

namespace adata {

namespace {

[[noreturn]] void mismatch(const char* what, std::size_t got, std::size_t want) {
  throw Error("matrix", ErrorCode::DimensionMismatch,
              std::string(what) + ": got " + std::to_string(got) + ", expected " +
                  std::to_string(want));
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) mismatch("matrix data length", data_.size(), rows_ * cols_);
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

std::vector<double> matvec(const Matrix& m, std::span<const double> x) {
  if (x.size() != m.cols()) mismatch("matvec operand", x.size(), m.cols());
  std::vector<double> out(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) out[r] = kernels::dot(m.row(r), x);
  return out;
}

std::vector<double> matvec_transposed(const Matrix& m, std::span<const double> y) {
  if (y.size() != m.rows()) mismatch("transposed matvec operand", y.size(), m.rows());
  std::vector<double> out(m.cols(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (y[r] != 0.0) kernels::axpy(y[r], m.row(r), out);
  }
  return out;
}

void add_outer(Matrix& m, double alpha, std::span<const double> u, std::span<const double> v) {
  if (u.size() != m.rows()) mismatch("outer product rows", u.size(), m.rows());
  if (v.size() != m.cols()) mismatch("outer product cols", v.size(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double s = alpha * u[r];
    if (s != 0.0) kernels::axpy(s, v, m.row(r));
  }
}

}  // namespace adata
