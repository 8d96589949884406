// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0
//
// Pipeline configuration. Stored as one JSON object; every key is optional and
// falls back to the defaults below. Unknown keys are rejected.
//
//   grid_side          int     16
//   profiles           [{alpha, beta, gamma}]  coarse/medium/fine
//   lambda_f           real    0.5    feature weight in the clustering cost
//   saliency_weight    real    1.0    scale of the saliency coordinate
//   eta                [3]     [1,1,1]
//   k_rule             string  "half_beta" | "fixed:<k>"
//   lambda, lambda_d, lambda_t  real  1.0, 0.1, 0.1
//   dims               {text_dim 64, descriptor_dim 32, hidden_dim 64,
//                       channels 16, model_dim 64}
//   seed               int     0      base seed for projector and clustering
//   encoder_seed       int     7      surrogate text encoder
//   max_iter, tol, restarts    50, 1e-7, 1
//   pool_pixel_stream  bool    false
//   controller         {lr 0.05, epochs 4000, items_per_class 200, corpus_seed 11, init_seed 3}

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "adata/clustering.hpp"
#include "adata/controller.hpp"
#include "adata/model_io.hpp"
#include "adata/objective.hpp"
#include "adata/selection.hpp"

namespace adata {

struct KRule {
  bool fixed = false;
  std::size_t k = 0;  // used when fixed

  /// K for a profile with `beta` clusters of which `clusters` exist.
  std::size_t resolve(std::size_t beta, std::size_t clusters) const;
  std::string to_string() const;
  /// Throws BadConfig.
  static KRule parse(const std::string& text);
};

struct ControllerTrainingConfig {
  double lr = 0.05;
  std::size_t epochs = 4000;
  std::size_t items_per_class = 200;
  std::uint64_t corpus_seed = 11;
  std::uint64_t init_seed = 3;
};

struct PipelineConfig {
  std::size_t grid_side = 16;
  std::vector<GranularityProfile> profiles = default_profiles();
  double lambda_f = 0.5;
  double saliency_weight = 1.0;
  ScoreWeights eta;
  KRule k_rule;
  LossWeights loss;
  ControllerDims controller_dims;
  std::size_t channels = 16;
  std::size_t model_dim = 64;
  std::uint64_t seed = 0;
  std::uint64_t encoder_seed = 7;
  std::size_t max_iter = 50;
  double tol = 1e-7;
  std::size_t restarts = 1;
  bool pool_pixel_stream = false;
  ControllerTrainingConfig controller;

  /// Throws BadConfig for inconsistent values and NonDivisible when a profile's
  /// alpha does not divide grid_side.
  void validate() const;

  ClusterOptions cluster_options() const;
};

Json to_json(const PipelineConfig& config);
/// Starts from `base` and overrides the keys present in `j`. Throws BadConfig.
PipelineConfig config_from_json(const Json& j, const PipelineConfig& base = {});
/// Throws IoFailure / BadFormat / BadConfig.
PipelineConfig read_config(const std::filesystem::path& path);

}  // namespace adata
