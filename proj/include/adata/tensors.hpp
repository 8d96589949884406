// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0
//
// Core grid containers. Grids are square (side x side) and stored row-major;
// a feature grid interleaves channels per location.

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace adata {

/// side x side grid of C-dimensional features, layout [row][col][channel].
class FeatureMap {
 public:
  FeatureMap() = default;
  /// Validates lengths and finiteness; throws DimensionMismatch / NonFinite.
  FeatureMap(std::size_t side, std::size_t channels, std::vector<double> data);
  static FeatureMap zeros(std::size_t side, std::size_t channels);

  std::size_t side() const noexcept { return side_; }
  std::size_t channels() const noexcept { return channels_; }
  std::size_t locations() const noexcept { return side_ * side_; }

  std::span<const double> at(std::size_t row, std::size_t col) const {
    return {data_.data() + (row * side_ + col) * channels_, channels_};
  }
  std::span<double> at(std::size_t row, std::size_t col) {
    return {data_.data() + (row * side_ + col) * channels_, channels_};
  }
  std::span<const double> location(std::size_t index) const {
    return {data_.data() + index * channels_, channels_};
  }

  const std::vector<double>& data() const noexcept { return data_; }

  friend bool operator==(const FeatureMap&, const FeatureMap&) = default;

 private:
  std::size_t side_ = 0;
  std::size_t channels_ = 0;
  std::vector<double> data_;
};

/// Non-negative per-location mass summing to one.
class SaliencyMap {
 public:
  SaliencyMap() = default;

  std::size_t side() const noexcept { return side_; }
  std::size_t locations() const noexcept { return side_ * side_; }
  double at(std::size_t row, std::size_t col) const { return data_[row * side_ + col]; }
  double operator[](std::size_t index) const { return data_[index]; }
  const std::vector<double>& data() const noexcept { return data_; }

  friend bool operator==(const SaliencyMap&, const SaliencyMap&) = default;

 private:
  friend SaliencyMap normalize_saliency(std::size_t side, std::span<const double> raw);
  std::size_t side_ = 0;
  std::vector<double> data_;
};

struct GranularityProfile {
  std::size_t alpha = 1;  ///< pooling factor
  std::size_t beta = 1;   ///< cluster count
  std::size_t gamma = 0;  ///< projector index

  friend bool operator==(const GranularityProfile&, const GranularityProfile&) = default;
};

/// Throws InvalidArgument unless alpha >= 1, beta >= 1 and gamma < bank_size.
void validate_profile(const GranularityProfile& profile, std::size_t bank_size);

enum class TokenRole { Pixel, Semantic, Text };

std::string_view to_string(TokenRole role);

struct TokenSequence {
  std::vector<std::vector<double>> tokens;
  std::vector<TokenRole> roles;

  std::size_t size() const noexcept { return tokens.size(); }
  /// Dimension shared by all tokens; 0 for an empty sequence.
  std::size_t dim() const noexcept { return tokens.empty() ? 0 : tokens.front().size(); }
  /// Throws DimensionMismatch if roles/tokens disagree in length or dimension.
  void validate() const;
};

struct GridEntry {
  std::array<double, 2> coord;  ///< (x, y) = ((col + 0.5) / side, (row + 0.5) / side)
  std::span<const double> feature;
};

/// Row-major view of every grid location. Entries borrow from `features`.
std::vector<GridEntry> flatten_grid(const FeatureMap& features);

/// Normalized cell-centre coordinate of location `index` in a side x side grid.
std::array<double, 2> cell_coord(std::size_t index, std::size_t side);

/// Scales non-negative values to unit mass. Throws AllZeroSaliency when every
/// entry is zero, InvalidArgument on negative or non-finite input.
std::vector<double> normalize_mass(std::span<const double> raw);

/// normalize_mass on a side x side grid.
SaliencyMap normalize_saliency(std::size_t side, std::span<const double> raw);

}  // namespace adata
