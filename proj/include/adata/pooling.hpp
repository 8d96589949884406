// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0
//
// Granularity-guided pooling: F' = K^T F K per channel, A' = K^T A K, with K a
// column-normalized block-average kernel of shape side_in x side_in/alpha.

#pragma once

#include <cstddef>

#include "adata/matrix.hpp"
#include "adata/tensors.hpp"

namespace adata {

struct PoolKernel {
  std::size_t side_in = 0;
  std::size_t side_out = 0;
  std::size_t alpha = 1;
  Matrix matrix;  // side_in x side_out
};

/// alpha == 1 yields the identity. Throws NonDivisible when alpha does not
/// divide side_in, InvalidArgument when alpha or side_in is zero.
PoolKernel build_kernel(std::size_t side_in, std::size_t alpha);

/// K^T G K applied to every channel. Throws DimensionMismatch.
FeatureMap pool_features(const FeatureMap& features, const PoolKernel& kernel);

/// K^T A K, renormalized to unit mass. Throws DimensionMismatch.
SaliencyMap pool_saliency(const SaliencyMap& saliency, const PoolKernel& kernel);

/// Majority label per output block (lowest label on ties); used to compare
/// clusterings on pooled grids against labels planted at full resolution.
std::vector<std::size_t> pool_labels(const std::vector<std::size_t>& labels, std::size_t side_in,
                                     std::size_t alpha);

}  // namespace adata
