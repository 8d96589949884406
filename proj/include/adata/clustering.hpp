// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0
//
// Relation-aware k-means over pooled tokens. Each token carries an attention
// descriptor a = (x, y, w_s * saliency) and its feature vector f; the cost of
// token i against centroid j is
//
//   |a_i - a_j|^2 + lambda_f * |f_i - f_j|^2
//
// where (a_j, f_j) are the member means of cluster j. Lloyd iterations
// minimize the sum over tokens of the cheapest centroid cost. Ties always go
// to the lowest index.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "adata/tensors.hpp"

namespace adata {

struct TokenDescriptor {
  std::array<double, 3> attention;  // x, y, weighted saliency
  double saliency = 0.0;            // unweighted, as read from the saliency map
  std::vector<double> feature;
};

struct Centroid {
  std::array<double, 3> a_center{};
  std::vector<double> f_center;
  std::vector<std::size_t> members;  // ascending token indices
};

struct Clustering {
  std::vector<Centroid> centroids;
  std::vector<std::size_t> assignments;
  std::vector<double> objective_trace;  // one entry per Lloyd step
  double final_objective = 0.0;         // sum of member costs at termination
  std::uint64_t seed = 0;
  double lambda_f = 0.0;
  std::size_t iterations = 0;
};

struct ClusterOptions {
  double lambda_f = 0.5;
  double saliency_weight = 1.0;
  std::size_t max_iter = 50;
  double tol = 1e-7;
  std::size_t restarts = 1;
  bool refine = true;  // single-token moves after Lloyd converges
};

/// One descriptor per location, row-major. Throws DimensionMismatch.
std::vector<TokenDescriptor> make_descriptors(const FeatureMap& features, const SaliencyMap& saliency,
                                              double saliency_weight = 1.0);

double pair_cost(const TokenDescriptor& token, const Centroid& centroid, double lambda_f);

/// k-means++ seeding in the joint cost: the first seed is drawn with
/// probability proportional to saliency, later seeds proportional to the cost
/// to the nearest chosen seed. Throws TooManyClusters when M exceeds the token
/// count, InvalidArgument when M is zero.
std::vector<Centroid> init_centroids(std::span<const TokenDescriptor> tokens, std::size_t num_clusters,
                                     std::uint64_t seed, double lambda_f = 0.5);

/// Centroid placed exactly on one token, with no members yet.
Centroid centroid_at(const TokenDescriptor& token);

struct LloydStep {
  std::vector<std::size_t> assignments;
  std::vector<Centroid> centroids;
  double objective = 0.0;  // sum_i min_j cost against the incoming centroids
};

/// Assign every token to its cheapest centroid, then move centroids to member
/// means. A cluster left empty takes over the worst-fit token (highest
/// assignment cost among tokens whose cluster can spare one).
LloydStep lloyd_step(std::span<const TokenDescriptor> tokens, std::span<const Centroid> centroids,
                     double lambda_f);

/// Single-token moves: each token in index order moves to the cluster that
/// lowers the exact objective most, counting the shift of both member means.
/// Passes repeat until no move helps or max_passes have run. Clusters never
/// become empty. Returns the number of moves made.
std::size_t refine_assignments(std::span<const TokenDescriptor> tokens, std::vector<std::size_t>& assignments,
                               std::size_t num_clusters, double lambda_f, std::size_t max_passes);

/// Lloyd iterations from explicit initial centroids until the objective
/// changes by at most tol or max_iter steps have run, followed by
/// refine_assignments when options.refine is set.
Clustering cluster_from(std::span<const TokenDescriptor> tokens, std::vector<Centroid> initial,
                        const ClusterOptions& options);

/// Full clustering of a pooled grid. With restarts > 1 the run with the lowest
/// final objective wins (earliest restart on ties); restart r uses seed
/// derive_seed(seed, r) for r > 0.
Clustering cluster(const FeatureMap& features, const SaliencyMap& saliency, std::size_t num_clusters,
                   std::uint64_t seed, const ClusterOptions& options = {});

/// Same as cluster() on prebuilt descriptors.
Clustering cluster_tokens(std::span<const TokenDescriptor> tokens, std::size_t num_clusters,
                          std::uint64_t seed, const ClusterOptions& options = {});

/// Sum over tokens of the cost to their assigned cluster's member means.
double assignment_objective(std::span<const TokenDescriptor> tokens,
                            std::span<const std::size_t> assignments, std::size_t num_clusters,
                            double lambda_f);

}  // namespace adata
