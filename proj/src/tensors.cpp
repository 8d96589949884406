// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0

#include "adata/tensors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adata/error.hpp"

namespace adata {

FeatureMap::FeatureMap(std::size_t side, std::size_t channels, std::vector<double> data)
    : side_(side), channels_(channels), data_(std::move(data)) {
  if (side_ == 0 || channels_ == 0) {
    throw Error("tensors", ErrorCode::InvalidArgument, "side and channels must be positive");
  }
  if (data_.size() != side_ * side_ * channels_) {
    throw Error("tensors", ErrorCode::DimensionMismatch,
                "feature data length " + std::to_string(data_.size()) + " != " +
                    std::to_string(side_ * side_ * channels_));
  }
  if (!std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); })) {
    throw Error("tensors", ErrorCode::NonFinite, "feature map contains non-finite values");
  }
}

FeatureMap FeatureMap::zeros(std::size_t side, std::size_t channels) {
  return FeatureMap(side, channels, std::vector<double>(side * side * channels, 0.0));
}

void validate_profile(const GranularityProfile& profile, std::size_t bank_size) {
  if (profile.alpha < 1 || profile.beta < 1) {
    throw Error("tensors", ErrorCode::InvalidArgument, "profile alpha and beta must be >= 1");
  }
  if (profile.gamma >= bank_size) {
    throw Error("tensors", ErrorCode::InvalidArgument,
                "profile gamma " + std::to_string(profile.gamma) + " outside projector bank of " +
                    std::to_string(bank_size));
  }
}

std::string_view to_string(TokenRole role) {
  switch (role) {
    case TokenRole::Pixel: return "pixel";
    case TokenRole::Semantic: return "semantic";
    case TokenRole::Text: return "text";
  }
  return "unknown";
}

void TokenSequence::validate() const {
  if (tokens.size() != roles.size()) {
    throw Error("tensors", ErrorCode::DimensionMismatch, "tokens and roles differ in length");
  }
  const std::size_t d = dim();
  for (const auto& t : tokens) {
    if (t.size() != d) {
      throw Error("tensors", ErrorCode::DimensionMismatch, "token dimensions differ");
    }
  }
}

std::array<double, 2> cell_coord(std::size_t index, std::size_t side) {
  const std::size_t row = index / side;
  const std::size_t col = index % side;
  const double s = static_cast<double>(side);
  return {(static_cast<double>(col) + 0.5) / s, (static_cast<double>(row) + 0.5) / s};
}

std::vector<GridEntry> flatten_grid(const FeatureMap& features) {
  std::vector<GridEntry> out;
  out.reserve(features.locations());
  for (std::size_t i = 0; i < features.locations(); ++i) {
    out.push_back({cell_coord(i, features.side()), features.location(i)});
  }
  return out;
}

std::vector<double> normalize_mass(std::span<const double> raw) {
  double total = 0.0;
  for (double v : raw) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error("tensors", ErrorCode::InvalidArgument,
                  "saliency entries must be finite and non-negative");
    }
    total += v;
  }
  if (total <= 0.0) {
    throw Error("tensors", ErrorCode::AllZeroSaliency, "saliency has no positive mass");
  }
  std::vector<double> out(raw.begin(), raw.end());
  for (double& v : out) v /= total;
  return out;
}

SaliencyMap normalize_saliency(std::size_t side, std::span<const double> raw) {
  if (side == 0 || raw.size() != side * side) {
    throw Error("tensors", ErrorCode::DimensionMismatch,
                "saliency length " + std::to_string(raw.size()) + " is not side^2 for side " +
                    std::to_string(side));
  }
  SaliencyMap map;
  map.side_ = side;
  map.data_ = normalize_mass(raw);
  return map;
}

}  // namespace adata
