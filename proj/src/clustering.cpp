// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0

#include "adata/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "adata/error.hpp"
#include "adata/kernels.hpp"
#include "adata/rng.hpp"

namespace adata {

namespace {

constexpr const char* kModule = "clustering";

double attention_distance(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double ds = a[2] - b[2];
  return dx * dx + dy * dy + ds * ds;
}

// Draw an index with probability proportional to weights[i]. Returns npos if
// the total weight is zero.
std::size_t sample_weighted(std::span<const double> weights, Rng& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) return std::numeric_limits<std::size_t>::max();
  const double target = rng.uniform() * total;
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    cumulative += weights[i];
    last_positive = i;
    if (cumulative > target) return i;
  }
  return last_positive;
}

std::vector<Centroid> member_means(std::span<const TokenDescriptor> tokens,
                                   std::span<const std::size_t> assignments,
                                   std::size_t num_clusters) {
  const std::size_t dim = tokens.front().feature.size();
  std::vector<Centroid> out(num_clusters);
  for (auto& c : out) c.f_center.assign(dim, 0.0);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    Centroid& c = out[assignments[i]];
    c.members.push_back(i);
    for (std::size_t d = 0; d < 3; ++d) c.a_center[d] += tokens[i].attention[d];
    kernels::axpy(1.0, tokens[i].feature, c.f_center);
  }
  for (auto& c : out) {
    if (c.members.empty()) continue;
    const double inv = 1.0 / static_cast<double>(c.members.size());
    for (double& v : c.a_center) v *= inv;
    for (double& v : c.f_center) v *= inv;
  }
  return out;
}

void require_tokens(std::span<const TokenDescriptor> tokens) {
  if (tokens.empty()) throw Error(kModule, ErrorCode::InvalidArgument, "no tokens to cluster");
  const std::size_t dim = tokens.front().feature.size();
  for (const auto& t : tokens) {
    if (t.feature.size() != dim) {
      throw Error(kModule, ErrorCode::DimensionMismatch, "token feature dimensions differ");
    }
  }
}

}  // namespace

std::vector<TokenDescriptor> make_descriptors(const FeatureMap& features, const SaliencyMap& saliency,
                                              double saliency_weight) {
  if (features.side() != saliency.side()) {
    throw Error(kModule, ErrorCode::DimensionMismatch,
                "feature side " + std::to_string(features.side()) + " != saliency side " +
                    std::to_string(saliency.side()));
  }
  std::vector<TokenDescriptor> out;
  out.reserve(features.locations());
  for (const auto& entry : flatten_grid(features)) {
    const std::size_t i = out.size();
    TokenDescriptor t;
    t.saliency = saliency[i];
    t.attention = {entry.coord[0], entry.coord[1], saliency_weight * saliency[i]};
    t.feature.assign(entry.feature.begin(), entry.feature.end());
    out.push_back(std::move(t));
  }
  return out;
}

double pair_cost(const TokenDescriptor& token, const Centroid& centroid, double lambda_f) {
  const double a = attention_distance(token.attention, centroid.a_center);
  if (lambda_f == 0.0) return a;
  return a + lambda_f * kernels::squared_distance(token.feature, centroid.f_center);
}

Centroid centroid_at(const TokenDescriptor& token) {
  return Centroid{token.attention, token.feature, {}};
}

std::vector<Centroid> init_centroids(std::span<const TokenDescriptor> tokens, std::size_t num_clusters,
                                     std::uint64_t seed, double lambda_f) {
  require_tokens(tokens);
  if (num_clusters == 0) throw Error(kModule, ErrorCode::InvalidArgument, "cluster count must be >= 1");
  if (num_clusters > tokens.size()) {
    throw Error(kModule, ErrorCode::TooManyClusters,
                std::to_string(num_clusters) + " clusters requested for " +
                    std::to_string(tokens.size()) + " tokens");
  }
  Rng rng(seed);
  const std::size_t n = tokens.size();
  std::vector<bool> chosen(n, false);
  std::vector<Centroid> out;
  out.reserve(num_clusters);

  std::vector<double> weights(n);
  for (std::size_t i = 0; i < n; ++i) weights[i] = tokens[i].saliency;
  std::size_t pick = sample_weighted(weights, rng);
  if (pick >= n) pick = static_cast<std::size_t>(rng.below(n));

  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  while (true) {
    chosen[pick] = true;
    out.push_back(centroid_at(tokens[pick]));
    if (out.size() == num_clusters) break;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = chosen[i] ? 0.0 : std::min(nearest[i], pair_cost(tokens[i], out.back(), lambda_f));
    }
    pick = sample_weighted(nearest, rng);
    if (pick >= n) {
      // Every remaining token coincides with a seed.
      pick = 0;
      while (chosen[pick]) ++pick;
    }
  }
  return out;
}

LloydStep lloyd_step(std::span<const TokenDescriptor> tokens, std::span<const Centroid> centroids,
                     double lambda_f) {
  require_tokens(tokens);
  if (centroids.empty()) throw Error(kModule, ErrorCode::InvalidArgument, "no centroids");
  const std::size_t n = tokens.size();
  const std::size_t m = centroids.size();

  LloydStep step;
  step.assignments.resize(n);
  std::vector<double> best_cost(n);
  std::vector<std::size_t> counts(m, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = 0;
    double cost = pair_cost(tokens[i], centroids[0], lambda_f);
    for (std::size_t j = 1; j < m; ++j) {
      const double c = pair_cost(tokens[i], centroids[j], lambda_f);
      if (c < cost) {
        cost = c;
        best = j;
      }
    }
    step.assignments[i] = best;
    best_cost[i] = cost;
    step.objective += cost;
    ++counts[best];
  }

  // Empty clusters take the worst-fit token from a cluster that keeps >= 1 member.
  std::vector<bool> moved(n, false);
  for (std::size_t j = 0; j < m; ++j) {
    if (counts[j] != 0) continue;
    std::size_t worst = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (moved[i] || counts[step.assignments[i]] < 2) continue;
      if (worst == n || best_cost[i] > best_cost[worst]) worst = i;
    }
    if (worst == n) continue;  // unreachable while m <= n
    --counts[step.assignments[worst]];
    step.assignments[worst] = j;
    counts[j] = 1;
    moved[worst] = true;
  }

  step.centroids = member_means(tokens, step.assignments, m);
  return step;
}

std::size_t refine_assignments(std::span<const TokenDescriptor> tokens, std::vector<std::size_t>& assignments,
                               std::size_t num_clusters, double lambda_f, std::size_t max_passes) {
  require_tokens(tokens);
  if (assignments.size() != tokens.size()) {
    throw Error(kModule, ErrorCode::DimensionMismatch, "assignment count != token count");
  }
  auto means = member_means(tokens, assignments, num_clusters);
  std::vector<double> counts(num_clusters);
  for (std::size_t j = 0; j < num_clusters; ++j) counts[j] = static_cast<double>(means[j].members.size());
  auto shift = [&](Centroid& c, double& count, const TokenDescriptor& t, double sign) {
    const double next = count + sign;
    for (std::size_t d = 0; d < 3; ++d) c.a_center[d] += sign * (t.attention[d] - c.a_center[d]) / next;
    for (std::size_t d = 0; d < c.f_center.size(); ++d) {
      c.f_center[d] += sign * (t.feature[d] - c.f_center[d]) / next;
    }
    count = next;
  };
  std::size_t moves = 0;
  for (std::size_t pass = 0; pass < max_passes; ++pass) {
    bool moved = false;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const std::size_t from = assignments[i];
      if (counts[from] < 2.0) continue;
      const double leave = counts[from] / (counts[from] - 1.0) * pair_cost(tokens[i], means[from], lambda_f);
      std::size_t to = from;
      double best_gain = 1e-12 * (1.0 + leave);
      for (std::size_t j = 0; j < num_clusters; ++j) {
        if (j == from) continue;
        const double join = counts[j] / (counts[j] + 1.0) * pair_cost(tokens[i], means[j], lambda_f);
        if (leave - join > best_gain) {
          best_gain = leave - join;
          to = j;
        }
      }
      if (to == from) continue;
      shift(means[from], counts[from], tokens[i], -1.0);
      shift(means[to], counts[to], tokens[i], 1.0);
      assignments[i] = to;
      moved = true;
      ++moves;
    }
    if (!moved) break;
  }
  return moves;
}

Clustering cluster_from(std::span<const TokenDescriptor> tokens, std::vector<Centroid> initial,
                        const ClusterOptions& options) {
  require_tokens(tokens);
  if (initial.empty()) throw Error(kModule, ErrorCode::InvalidArgument, "no initial centroids");
  if (initial.size() > tokens.size()) {
    throw Error(kModule, ErrorCode::TooManyClusters, "more centroids than tokens");
  }
  if (options.max_iter < 1 || !(options.tol >= 0.0) || !(options.lambda_f >= 0.0)) {
    throw Error(kModule, ErrorCode::InvalidArgument, "max_iter >= 1, tol >= 0, lambda_f >= 0 required");
  }
  Clustering result;
  result.lambda_f = options.lambda_f;
  result.centroids = std::move(initial);
  for (std::size_t iter = 0; iter < options.max_iter; ++iter) {
    LloydStep step = lloyd_step(tokens, result.centroids, options.lambda_f);
    result.centroids = std::move(step.centroids);
    result.assignments = std::move(step.assignments);
    result.objective_trace.push_back(step.objective);
    result.iterations = iter + 1;
    const std::size_t t = result.objective_trace.size();
    if (t >= 2 && std::abs(result.objective_trace[t - 2] - result.objective_trace[t - 1]) <= options.tol) {
      break;
    }
  }
  if (options.refine &&
      refine_assignments(tokens, result.assignments, result.centroids.size(), options.lambda_f,
                         options.max_iter) > 0) {
    result.centroids = member_means(tokens, result.assignments, result.centroids.size());
  }
  result.final_objective = 0.0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    result.final_objective += pair_cost(tokens[i], result.centroids[result.assignments[i]], options.lambda_f);
  }
  return result;
}

Clustering cluster_tokens(std::span<const TokenDescriptor> tokens, std::size_t num_clusters,
                          std::uint64_t seed, const ClusterOptions& options) {
  const std::size_t restarts = std::max<std::size_t>(1, options.restarts);
  Clustering best;
  for (std::size_t r = 0; r < restarts; ++r) {
    const std::uint64_t run_seed = r == 0 ? seed : derive_seed(seed, r);
    Clustering run =
        cluster_from(tokens, init_centroids(tokens, num_clusters, run_seed, options.lambda_f), options);
    run.seed = run_seed;
    if (r == 0 || run.final_objective < best.final_objective) best = std::move(run);
  }
  return best;
}

Clustering cluster(const FeatureMap& features, const SaliencyMap& saliency, std::size_t num_clusters,
                   std::uint64_t seed, const ClusterOptions& options) {
  const auto tokens = make_descriptors(features, saliency, options.saliency_weight);
  return cluster_tokens(tokens, num_clusters, seed, options);
}

double assignment_objective(std::span<const TokenDescriptor> tokens,
                            std::span<const std::size_t> assignments, std::size_t num_clusters,
                            double lambda_f) {
  require_tokens(tokens);
  if (assignments.size() != tokens.size()) {
    throw Error(kModule, ErrorCode::DimensionMismatch, "assignment count != token count");
  }
  for (std::size_t a : assignments) {
    if (a >= num_clusters) throw Error(kModule, ErrorCode::InvalidArgument, "assignment out of range");
  }
  const auto means = member_means(tokens, assignments, num_clusters);
  double total = 0.0;
  for (std::size_t i = 0; i < tokens.size(); ++i) total += pair_cost(tokens[i], means[assignments[i]], lambda_f);
  return total;
}

}  // namespace adata
