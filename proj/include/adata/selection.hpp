// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0
//
// Cluster quality scoring and top-K semantic-token emission.
//
//   size        |members| / N
//   coherence   1 - mean cosine distance of members to the feature mean, in [0, 1]
//   dispersion  RMS distance of member coords to their mean, divided by sqrt(2)
//   composite   eta1 * size + eta2 * coherence - eta3 * dispersion

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "adata/clustering.hpp"

namespace adata {

struct ScoreWeights {
  double eta1 = 1.0;
  double eta2 = 1.0;
  double eta3 = 1.0;
};

struct ClusterScore {
  double size_score = 0.0;
  double coherence_score = 0.0;
  double dispersion_score = 0.0;
  double composite = 0.0;
};

struct SemanticTokenSet {
  std::vector<std::vector<double>> tokens;  // descending composite score
  std::vector<std::size_t> source_clusters;
  std::vector<ClusterScore> scores;

  std::size_t size() const noexcept { return tokens.size(); }
};

/// Member indices refer to `tokens`. All scorers throw InvalidArgument on an
/// empty cluster.
double score_size(std::span<const std::size_t> members, std::size_t total_tokens);

/// Throws ZeroVector when a member feature has zero norm.
double score_coherence(std::span<const std::size_t> members, std::span<const TokenDescriptor> tokens);

double score_dispersion(std::span<const std::size_t> members, std::span<const TokenDescriptor> tokens);

double composite_score(const ClusterScore& scores, const ScoreWeights& weights);

/// All three scores plus the composite for one cluster.
ClusterScore score_cluster(std::span<const std::size_t> members, std::span<const TokenDescriptor> tokens,
                           const ScoreWeights& weights);

/// Indices of the K largest scores by descending score, then ascending index.
/// Returns every index when K exceeds the score count. Throws InvalidArgument
/// for K == 0.
std::vector<std::size_t> select_topk(std::span<const double> scores, std::size_t k);

/// Default K rule: ceil(beta / 2), capped at the cluster count.
std::size_t half_beta_k(std::size_t beta, std::size_t num_clusters);

/// Saliency-weighted mean member feature for each selected cluster (weights
/// renormalized within the cluster; plain mean if all member saliencies are 0).
SemanticTokenSet emit_semantic_tokens(const Clustering& clustering, std::span<const std::size_t> selected,
                                      std::span<const TokenDescriptor> tokens,
                                      std::span<const ClusterScore> scores);

}  // namespace adata
