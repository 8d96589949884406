// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0
//
// (alpha, beta) ablation over planted scenes. Each cell runs the pipeline with
// a forced profile on every scene and reports recovery ARI against the pooled
// planted labels.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "adata/pipeline.hpp"
#include "adata/scene.hpp"

namespace adata {

/// beta value meaning "one cluster per pooled token".
inline constexpr std::size_t kBetaAll = 0;

struct SweepOptions {
  std::vector<std::size_t> alphas = {1, 2, 4};
  std::vector<std::size_t> betas = {3, 12, kBetaAll};
  std::size_t scenes = 5;
  SceneOptions scene;  // seed field is the base; scene s uses derive_seed(seed, s)
  std::string question = "what is in this image";
  std::size_t jobs = 1;
  bool timings = false;
};

struct SweepCell {
  std::size_t index = 0;
  std::size_t alpha = 1;
  std::size_t beta = 1;         // resolved cluster count
  std::string beta_label;       // as requested ("all" for kBetaAll)
  std::uint64_t cell_seed = 0;
  std::size_t n_tokens = 0;     // pooled tokens entering clustering
  double ari_mean = 0.0;
  double ari_min = 0.0;
  double mean_coherence = 0.0;  // over all clusters, averaged over scenes
  TokenBudget budget;           // from the first scene
  double runtime_ms = 0.0;
};

/// cell_seed = base ^ mix(cell index).
std::uint64_t sweep_cell_seed(std::uint64_t base, std::size_t cell_index);

/// Scene s of a sweep.
SceneOptions sweep_scene(const SweepOptions& options, std::size_t scene_index);

/// Cells in row-major (alpha, beta) order. Throws NonDivisible,
/// TooManyClusters, BadConfig; cells run on up to `jobs` threads.
std::vector<SweepCell> run_sweep(const PipelineConfig& config, const SweepOptions& options);

/// CSV with a header line; the runtime column appears only with timings.
std::string sweep_csv(const std::vector<SweepCell>& cells, bool timings);

}  // namespace adata
