// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0

#include "adata/pooling.hpp"

#include <map>
#include <string>

#include "adata/error.hpp"
#include "adata/kernels.hpp"

namespace adata {

namespace {

constexpr const char* kModule = "pooling";

void require_side(std::size_t side, const PoolKernel& kernel) {
  if (side != kernel.side_in || kernel.matrix.rows() != kernel.side_in ||
      kernel.matrix.cols() != kernel.side_out) {
    throw Error(kModule, ErrorCode::DimensionMismatch,
                "grid side " + std::to_string(side) + " does not match kernel input side " +
                    std::to_string(kernel.side_in));
  }
}

// out = K^T G K for a grid whose locations carry `width` interleaved values.
// Rows of G are contracted first (G K), then columns (K^T (G K)); zero kernel
// entries are skipped, so the identity kernel copies values exactly.
std::vector<double> bilinear_pool(const std::vector<double>& grid, std::size_t width,
                                  const PoolKernel& kernel) {
  const std::size_t n = kernel.side_in;
  const std::size_t m = kernel.side_out;
  const Matrix& k = kernel.matrix;

  std::vector<double> right(n * m * width, 0.0);  // [row][j][ch]
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const std::span<const double> src(grid.data() + (r * n + c) * width, width);
      for (std::size_t j = 0; j < m; ++j) {
        const double w = k(c, j);
        if (w == 0.0) continue;
        kernels::axpy(w, src, std::span<double>(right.data() + (r * m + j) * width, width));
      }
    }
  }

  std::vector<double> out(m * m * width, 0.0);  // [i][j][ch]
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < m; ++i) {
      const double w = k(r, i);
      if (w == 0.0) continue;
      kernels::axpy(w, std::span<const double>(right.data() + r * m * width, m * width),
                    std::span<double>(out.data() + i * m * width, m * width));
    }
  }
  return out;
}

}  // namespace

PoolKernel build_kernel(std::size_t side_in, std::size_t alpha) {
  if (side_in == 0 || alpha == 0) {
    throw Error(kModule, ErrorCode::InvalidArgument, "side_in and alpha must be positive");
  }
  if (side_in % alpha != 0) {
    throw Error(kModule, ErrorCode::NonDivisible,
                "alpha " + std::to_string(alpha) + " does not divide grid side " +
                    std::to_string(side_in));
  }
  PoolKernel kernel;
  kernel.side_in = side_in;
  kernel.side_out = side_in / alpha;
  kernel.alpha = alpha;
  kernel.matrix = Matrix(side_in, kernel.side_out);
  const double weight = 1.0 / static_cast<double>(alpha);
  for (std::size_t j = 0; j < kernel.side_out; ++j) {
    for (std::size_t r = j * alpha; r < (j + 1) * alpha; ++r) kernel.matrix(r, j) = weight;
  }
  return kernel;
}

FeatureMap pool_features(const FeatureMap& features, const PoolKernel& kernel) {
  require_side(features.side(), kernel);
  return FeatureMap(kernel.side_out, features.channels(),
                    bilinear_pool(features.data(), features.channels(), kernel));
}

SaliencyMap pool_saliency(const SaliencyMap& saliency, const PoolKernel& kernel) {
  require_side(saliency.side(), kernel);
  // Identity kernel: the map is already unit mass, and renormalizing would
  // perturb the last bit.
  if (kernel.alpha == 1) return saliency;
  const auto pooled = bilinear_pool(saliency.data(), 1, kernel);
  return normalize_saliency(kernel.side_out, pooled);
}

std::vector<std::size_t> pool_labels(const std::vector<std::size_t>& labels, std::size_t side_in,
                                     std::size_t alpha) {
  if (labels.size() != side_in * side_in) {
    throw Error(kModule, ErrorCode::DimensionMismatch, "label grid is not side_in^2");
  }
  const PoolKernel kernel = build_kernel(side_in, alpha);
  const std::size_t m = kernel.side_out;
  std::vector<std::size_t> out(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      std::map<std::size_t, std::size_t> votes;
      for (std::size_t r = i * alpha; r < (i + 1) * alpha; ++r) {
        for (std::size_t c = j * alpha; c < (j + 1) * alpha; ++c) ++votes[labels[r * side_in + c]];
      }
      std::size_t best = votes.begin()->first;
      std::size_t best_count = 0;
      for (const auto& [label, count] : votes) {
        if (count > best_count) {
          best = label;
          best_count = count;
        }
      }
      out[i * m + j] = best;
    }
  }
  return out;
}

}  // namespace adata
