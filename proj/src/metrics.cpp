// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0

#include "adata/metrics.hpp"

#include <map>
#include <utility>

#include "adata/error.hpp"

namespace adata {

namespace {

double choose2(double n) { return n * (n - 1.0) / 2.0; }

}  // namespace

double adjusted_rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  if (a.size() != b.size()) throw Error("metrics", ErrorCode::DimensionMismatch, "labelings differ in length");
  if (a.empty()) throw Error("metrics", ErrorCode::InvalidArgument, "empty labeling");

  if (a.size() < 2) return 1.0;

  std::map<std::pair<std::size_t, std::size_t>, double> joint;
  std::map<std::size_t, double> rows;
  std::map<std::size_t, double> cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1.0;
    rows[a[i]] += 1.0;
    cols[b[i]] += 1.0;
  }
  double index = 0.0;
  for (const auto& [_, n] : joint) index += choose2(n);
  double sum_a = 0.0;
  double sum_b = 0.0;
  for (const auto& [_, n] : rows) sum_a += choose2(n);
  for (const auto& [_, n] : cols) sum_b += choose2(n);
  const double expected = sum_a * sum_b / choose2(static_cast<double>(a.size()));
  const double max_index = 0.5 * (sum_a + sum_b);
  // Degenerate: both sides trivial in the same way.
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

}  // namespace adata
