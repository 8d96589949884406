// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end workflow: controller -> pooling -> clustering -> selection ->
// fusion. Produces a JSON report and the mixed token stream F_mix.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adata/config.hpp"
#include "adata/fusion.hpp"
#include "adata/model_io.hpp"
#include "adata/objective.hpp"

namespace adata {

struct PipelineInputs {
  FeatureMap features;
  SaliencyMap saliency;
  TextEmbedding text;
  std::vector<TokenId> question_ids;  // informational; empty for external embeddings
};

struct PipelineOptions {
  /// Forces a profile index instead of the controller's argmax.
  std::optional<std::size_t> profile_override;
  /// Forces (alpha, beta, gamma) outright; used by sweeps.
  std::optional<GranularityProfile> profile_explicit;
  bool timings = false;
};

struct PipelineResult {
  std::optional<GranularityDistribution> distribution;
  std::vector<double> descriptor;  // h; empty without a controller
  GranularityProfile profile;
  std::optional<std::size_t> profile_index;
  FeatureMap pooled_features;
  SaliencyMap pooled_saliency;
  std::vector<TokenDescriptor> descriptors;
  Clustering clustering;
  std::vector<ClusterScore> scores;
  std::size_t k = 0;
  std::vector<std::size_t> selected;
  SemanticTokenSet semantic;
  std::vector<std::vector<double>> pixel_features;  // raw C-dim pixel stream
  TokenSequence mix;
  TokenBudget budget;
  Json report;
};

/// Projector bank shared by every run with this config.
ProjectorBank config_projector(const PipelineConfig& config);

/// Seed used for clustering under `config`.
std::uint64_t cluster_seed(const PipelineConfig& config);

/// Runs the workflow. `controller` may be null only when a profile is forced.
/// Errors propagate with module-qualified codes.
PipelineResult run_pipeline(const PipelineConfig& config, const ControllerModel* controller,
                            const PipelineInputs& inputs, const PipelineOptions& options = {});

/// Training sample derived from a pipeline run; context is W_p^T h.
HeadSample make_head_sample(const PipelineResult& result, const ControllerModel& controller,
                            std::size_t label);

/// Head samples from `count` planted scenes whose class alternates 0, 1, 0,
/// ... Scene s uses seed derive_seed(config.seed, 0x7A + s) and every run is
/// forced to `profile_index`.
std::vector<HeadSample> planted_head_samples(const PipelineConfig& config, const ControllerModel& controller,
                                             const std::string& question, std::size_t count,
                                             std::size_t profile_index);

/// Trains the default controller described by config.controller.
ControllerModel train_default_controller(const PipelineConfig& config,
                                         std::vector<double>* loss_trace = nullptr);

}  // namespace adata
