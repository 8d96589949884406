// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0

#include "adata/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "adata/error.hpp"
#include "adata/kernels.hpp"

namespace adata {

namespace {

constexpr const char* kModule = "selection";

void require_members(std::span<const std::size_t> members, std::size_t token_count) {
  if (members.empty()) throw Error(kModule, ErrorCode::InvalidArgument, "cluster has no members");
  for (std::size_t i : members) {
    if (i >= token_count) throw Error(kModule, ErrorCode::InvalidArgument, "member index out of range");
  }
}

}  // namespace

double score_size(std::span<const std::size_t> members, std::size_t total_tokens) {
  if (members.empty() || total_tokens == 0 || members.size() > total_tokens) {
    throw Error(kModule, ErrorCode::InvalidArgument, "size score needs 0 < |members| <= N");
  }
  return static_cast<double>(members.size()) / static_cast<double>(total_tokens);
}

double score_coherence(std::span<const std::size_t> members, std::span<const TokenDescriptor> tokens) {
  require_members(members, tokens.size());
  for (std::size_t i : members) {
    if (kernels::dot(tokens[i].feature, tokens[i].feature) == 0.0) {
      throw Error(kModule, ErrorCode::ZeroVector,
                  "token " + std::to_string(i) + " has a zero feature vector");
    }
  }
  if (members.size() == 1) return 1.0;

  std::vector<double> mean(tokens[members.front()].feature.size(), 0.0);
  for (std::size_t i : members) kernels::axpy(1.0, tokens[i].feature, mean);
  const double mean_norm = std::sqrt(kernels::dot(mean, mean));
  // A zero mean has no direction; every member is then at cosine distance 1.
  if (mean_norm == 0.0) return 0.0;

  double cos_sum = 0.0;
  for (std::size_t i : members) {
    const auto& f = tokens[i].feature;
    cos_sum += kernels::dot(f, mean) / (std::sqrt(kernels::dot(f, f)) * mean_norm);
  }
  const double mean_distance = 1.0 - cos_sum / static_cast<double>(members.size());
  return std::clamp(1.0 - mean_distance, 0.0, 1.0);
}

double score_dispersion(std::span<const std::size_t> members, std::span<const TokenDescriptor> tokens) {
  require_members(members, tokens.size());
  if (members.size() == 1) return 0.0;
  double cx = 0.0;
  double cy = 0.0;
  for (std::size_t i : members) {
    cx += tokens[i].attention[0];
    cy += tokens[i].attention[1];
  }
  const double inv = 1.0 / static_cast<double>(members.size());
  cx *= inv;
  cy *= inv;
  double sq = 0.0;
  for (std::size_t i : members) {
    const double dx = tokens[i].attention[0] - cx;
    const double dy = tokens[i].attention[1] - cy;
    sq += dx * dx + dy * dy;
  }
  return std::sqrt(sq * inv) / std::numbers::sqrt2;
}

double composite_score(const ClusterScore& s, const ScoreWeights& w) {
  if (w.eta1 < 0.0 || w.eta2 < 0.0 || w.eta3 < 0.0) {
    throw Error(kModule, ErrorCode::InvalidArgument, "score weights must be non-negative");
  }
  return w.eta1 * s.size_score + w.eta2 * s.coherence_score - w.eta3 * s.dispersion_score;
}

ClusterScore score_cluster(std::span<const std::size_t> members, std::span<const TokenDescriptor> tokens,
                           const ScoreWeights& weights) {
  ClusterScore s;
  s.size_score = score_size(members, tokens.size());
  s.coherence_score = score_coherence(members, tokens);
  s.dispersion_score = score_dispersion(members, tokens);
  s.composite = composite_score(s, weights);
  return s;
}

std::vector<std::size_t> select_topk(std::span<const double> scores, std::size_t k) {
  if (k == 0) throw Error(kModule, ErrorCode::InvalidArgument, "K must be >= 1");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  order.resize(std::min(k, order.size()));
  return order;
}

std::size_t half_beta_k(std::size_t beta, std::size_t num_clusters) {
  return std::min((beta + 1) / 2, num_clusters);
}

SemanticTokenSet emit_semantic_tokens(const Clustering& clustering, std::span<const std::size_t> selected,
                                      std::span<const TokenDescriptor> tokens,
                                      std::span<const ClusterScore> scores) {
  if (scores.size() != clustering.centroids.size()) {
    throw Error(kModule, ErrorCode::DimensionMismatch, "one score per cluster required");
  }
  SemanticTokenSet out;
  for (std::size_t j : selected) {
    if (j >= clustering.centroids.size()) {
      throw Error(kModule, ErrorCode::InvalidArgument, "selected cluster index out of range");
    }
    const auto& members = clustering.centroids[j].members;
    require_members(members, tokens.size());

    double mass = 0.0;
    for (std::size_t i : members) mass += tokens[i].saliency;
    std::vector<double> token(tokens[members.front()].feature.size(), 0.0);
    for (std::size_t i : members) {
      const double w = mass > 0.0 ? tokens[i].saliency / mass : 1.0 / static_cast<double>(members.size());
      if (w != 0.0) kernels::axpy(w, tokens[i].feature, token);
    }
    out.tokens.push_back(std::move(token));
    out.source_clusters.push_back(j);
    out.scores.push_back(scores[j]);
  }
  return out;
}

}  // namespace adata
