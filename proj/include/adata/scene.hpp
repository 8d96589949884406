// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0
//
// Planted synthetic scenes: G blobs with distinct feature signatures and
// Gaussian spatial footprints. Each location belongs to the blob whose
// footprint is largest there.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "adata/tensors.hpp"

namespace adata {

struct SceneOptions {
  std::size_t groups = 3;         // G
  std::size_t side = 16;
  std::size_t channels = 16;      // C
  double separation = 10.0;       // min signature distance, in units of intra_spread
  double intra_spread = 1.0;      // expected norm of per-location feature noise
  double footprint_sigma = 0.15;  // Gaussian footprint width, normalized coords
  std::size_t class_label = 0;
  double class_shift = 1.0;       // norm of the per-class offset added everywhere
  std::uint64_t seed = 0;
};

struct SyntheticScene {
  FeatureMap features;
  SaliencyMap saliency;
  std::vector<std::size_t> labels;  // planted blob per location, row-major
  std::vector<std::array<double, 2>> centers;
  std::vector<std::vector<double>> signatures;
  std::size_t class_label = 0;
};

/// Deterministic per options. Throws InvalidArgument unless side, C, G >= 1,
/// G <= side^2, separation and intra_spread are non-negative.
SyntheticScene generate_scene(const SceneOptions& options);

}  // namespace adata
