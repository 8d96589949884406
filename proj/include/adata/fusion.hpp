// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "adata/matrix.hpp"
#include "adata/tensors.hpp"

namespace adata {

struct LinearMap {
  Matrix weight;             // D x C
  std::vector<double> bias;  // D
};

/// One projector per profile; gamma selects the weight set.
struct ProjectorBank {
  std::vector<LinearMap> maps;

  std::size_t size() const noexcept { return maps.size(); }
  std::size_t input_dim() const noexcept { return maps.empty() ? 0 : maps.front().weight.cols(); }
  std::size_t output_dim() const noexcept { return maps.empty() ? 0 : maps.front().weight.rows(); }
  /// Throws DimensionMismatch / NonFinite.
  void validate() const;
};

/// Gaussian weights with std 1/sqrt(C), zero bias; frozen after creation.
ProjectorBank make_projector_bank(std::size_t count, std::size_t input_dim, std::size_t output_dim,
                                  std::uint64_t seed);

/// Applies maps[gamma] to every token. Throws BadGamma, DimensionMismatch.
std::vector<std::vector<double>> project(std::span<const std::vector<double>> tokens,
                                         const ProjectorBank& bank, std::size_t gamma);

/// Pixel tokens, then semantic tokens, then text tokens, with matching roles.
/// Throws DimensionMismatch when the three groups disagree on dimension.
TokenSequence assemble(std::span<const std::vector<double>> pixel_tokens,
                       std::span<const std::vector<double>> semantic_tokens,
                       std::span<const std::vector<double>> text_tokens);

struct TokenBudget {
  std::size_t n_pixel = 0;
  std::size_t n_semantic = 0;
  std::size_t n_text = 0;
  std::size_t total = 0;
  double overhead_ratio = 0.0;  // n_semantic / n_pixel, 0 without pixel tokens
};

TokenBudget token_budget(const TokenSequence& sequence);

}  // namespace adata
