// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "adata/clustering.hpp"
#include "adata/error.hpp"
#include "adata/metrics.hpp"
#include "adata/pooling.hpp"
#include "adata/scene.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace adata;

namespace {

TokenDescriptor at_x(double x, std::vector<double> f = {1.0}) { return {{x, 0.0, 0.0}, 0.0, std::move(f)}; }

// Independent 2-D k-means: nearest centre by squared distance (lowest index on
// ties), centres moved to member means, emptied clusters take the point
// farthest from its centre among clusters with at least two members.
std::vector<std::size_t> plain_kmeans(const std::vector<std::array<double, 2>>& pts,
                                      std::vector<std::array<double, 2>> centres, std::size_t max_iter) {
  const std::size_t n = pts.size();
  const std::size_t m = centres.size();
  std::vector<std::size_t> assign(n, 0);
  for (std::size_t it = 0; it < max_iter; ++it) {
    std::vector<double> cost(n);
    for (std::size_t i = 0; i < n; ++i) {
      double best = INFINITY;
      for (std::size_t j = 0; j < m; ++j) {
        const double dx = pts[i][0] - centres[j][0];
        const double dy = pts[i][1] - centres[j][1];
        const double d = dx * dx + dy * dy;
        if (d < best) {
          best = d;
          assign[i] = j;
        }
      }
      cost[i] = best;
    }
    std::vector<std::size_t> count(m, 0);
    for (std::size_t a : assign) ++count[a];
    for (std::size_t j = 0; j < m; ++j) {
      if (count[j] != 0) continue;
      std::size_t worst = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (count[assign[i]] >= 2 && (worst == n || cost[i] > cost[worst])) worst = i;
      }
      --count[assign[worst]];
      assign[worst] = j;
      count[j] = 1;
      cost[worst] = 0.0;
    }
    std::vector<std::array<double, 2>> next(m, {0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i) {
      next[assign[i]][0] += pts[i][0];
      next[assign[i]][1] += pts[i][1];
    }
    for (std::size_t j = 0; j < m; ++j) {
      next[j][0] /= static_cast<double>(count[j]);
      next[j][1] /= static_cast<double>(count[j]);
    }
    if (next == centres) break;
    centres = next;
  }
  return assign;
}

}  // namespace

TEST_CASE("lloyd_step examples") {
  // Two tokens, two centroids sitting on them.
  const std::vector<TokenDescriptor> two = {at_x(0.2, {1, 0}), at_x(0.8, {0, 1})};
  const std::vector<Centroid> on = {centroid_at(two[0]), centroid_at(two[1])};
  const auto s = lloyd_step(two, on, 0.5);
  CHECK(s.assignments == std::vector<std::size_t>{0, 1});
  CHECK(s.objective == 0.0);

  // Collinear points, centres seeded at the ends.
  const std::vector<TokenDescriptor> line = {at_x(0.0), at_x(0.1), at_x(0.9), at_x(1.0)};
  const std::vector<Centroid> ends = {centroid_at(line[0]), centroid_at(line[3])};
  const auto step = lloyd_step(line, ends, 0.5);
  CHECK(step.assignments == std::vector<std::size_t>{0, 0, 1, 1});
  CHECK(step.centroids[0].a_center[0] == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(step.centroids[1].a_center[0] == doctest::Approx(0.95).epsilon(1e-15));

  // Already converged: a second step changes nothing.
  const auto again = lloyd_step(line, step.centroids, 0.5);
  CHECK(again.assignments == step.assignments);
  const auto third = lloyd_step(line, again.centroids, 0.5);
  CHECK(std::abs(third.objective - again.objective) <= 1e-12);
}

TEST_CASE("single cluster sits at the global means") {
  Rng rng(3);
  const auto tokens = testing::random_tokens(rng, 20, 3);
  const auto c = cluster_tokens(tokens, 1, 9);
  std::array<double, 3> a{};
  std::vector<double> f(3, 0.0);
  for (const auto& t : tokens) {
    for (int d = 0; d < 3; ++d) a[d] += t.attention[d] / 20.0;
    for (int d = 0; d < 3; ++d) f[d] += t.feature[d] / 20.0;
  }
  double variance = 0.0;
  for (const auto& t : tokens) {
    for (int d = 0; d < 3; ++d) variance += std::pow(t.attention[d] - a[d], 2);
    for (int d = 0; d < 3; ++d) variance += 0.5 * std::pow(t.feature[d] - f[d], 2);
  }
  for (int d = 0; d < 3; ++d) CHECK(c.centroids[0].a_center[d] == doctest::Approx(a[d]).epsilon(1e-12));
  CHECK(c.final_objective == doctest::Approx(variance).epsilon(1e-12));
}

TEST_CASE("too many clusters") {
  Rng rng(1);
  const auto tokens = testing::random_tokens(rng, 4, 2);
  try {
    cluster_tokens(tokens, 5, 0);
    FAIL("expected TooManyClusters");
  } catch (const Error& e) {
    CHECK(e.qualified_code() == "clustering.TooManyClusters");
  }
}

TEST_CASE("objective trace is non-increasing and clusters are non-empty") {
  Rng rng(77);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng.below(60);
    const std::size_t m = 1 + rng.below(std::min<std::size_t>(n, 12));
    const auto tokens = testing::random_tokens(rng, n, 1 + rng.below(6));
    ClusterOptions o;
    o.lambda_f = rng.uniform(0.0, 2.0);
    o.tol = 0.0;
    const auto c = cluster_tokens(tokens, m, rng.next_u64(), o);
    for (std::size_t i = 1; i < c.objective_trace.size(); ++i) {
      CHECK(c.objective_trace[i] - c.objective_trace[i - 1] <= 1e-9);
    }
    std::size_t total = 0;
    for (const auto& ct : c.centroids) {
      CHECK(!ct.members.empty());
      total += ct.members.size();
    }
    CHECK(total == n);
  }
}

TEST_CASE("refinement never raises the objective and keeps clusters non-empty") {
  Rng rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng.below(40);
    const std::size_t m = 1 + rng.below(std::min<std::size_t>(n, 8));
    const auto tokens = testing::random_tokens(rng, n, 1 + rng.below(4));
    const double lambda_f = rng.uniform(0.0, 2.0);
    const auto init = init_centroids(tokens, m, rng.next_u64(), lambda_f);
    ClusterOptions o;
    o.lambda_f = lambda_f;
    o.refine = false;
    const auto lloyd = cluster_from(tokens, init, o);
    o.refine = true;
    const auto refined = cluster_from(tokens, init, o);
    CHECK(refined.final_objective <= lloyd.final_objective + 1e-9);
    CHECK(refined.final_objective ==
          doctest::Approx(assignment_objective(tokens, refined.assignments, m, lambda_f)).epsilon(1e-12));
    std::vector<std::size_t> counts(m, 0);
    for (std::size_t a : refined.assignments) ++counts[a];
    for (std::size_t c : counts) CHECK(c > 0);
  }
}

TEST_CASE("best of 20 restarts reaches the exhaustive optimum") {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 3 + rng.below(6);
    const std::size_t m = 2 + rng.below(2);
    const auto tokens = testing::random_tokens(rng, n, 2);
    ClusterOptions o;
    o.restarts = 20;
    o.tol = 0.0;
    const auto c = cluster_tokens(tokens, m, rng.next_u64(), o);
    CAPTURE(trial);
    CHECK(c.final_objective <= testing::brute_force_optimum(tokens, m, o.lambda_f) + 1e-6);
  }
}

TEST_CASE("clustering is bit-deterministic") {
  Rng rng(5);
  const auto tokens = testing::random_tokens(rng, 40, 4);
  const auto a = cluster_tokens(tokens, 6, 99);
  const auto b = cluster_tokens(tokens, 6, 99);
  CHECK(a.assignments == b.assignments);
  CHECK(a.objective_trace == b.objective_trace);
  CHECK(a.final_objective == b.final_objective);
}

TEST_CASE("lambda_f = 0 with equal saliency is plain spatial k-means") {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 10 + rng.below(40);
    const std::size_t m = 2 + rng.below(5);
    auto tokens = testing::random_tokens(rng, n, 3);
    for (auto& t : tokens) {
      t.saliency = 0.5;
      t.attention[2] = 0.5;
    }
    const std::uint64_t seed = rng.next_u64();
    ClusterOptions o;
    o.lambda_f = 0.0;
    o.tol = 0.0;
    o.max_iter = 200;
    o.refine = false;
    const auto c = cluster_tokens(tokens, m, seed, o);

    const auto init = init_centroids(tokens, m, seed, 0.0);
    std::vector<std::array<double, 2>> pts, centres;
    for (const auto& t : tokens) pts.push_back({t.attention[0], t.attention[1]});
    for (const auto& ct : init) centres.push_back({ct.a_center[0], ct.a_center[1]});
    CHECK(plain_kmeans(pts, centres, 200) == c.assignments);
  }
}

TEST_CASE("permuted input gives the same partition") {
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 20 + rng.below(30);
    const auto tokens = testing::random_tokens(rng, n, 3);
    const std::size_t m = 2 + rng.below(5);
    const auto init = init_centroids(tokens, m, rng.next_u64());
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    std::vector<TokenDescriptor> shuffled;
    for (std::size_t i : perm) shuffled.push_back(tokens[i]);

    ClusterOptions o;
    o.refine = false;
    const auto a = cluster_from(tokens, init, o);
    const auto b = cluster_from(shuffled, init, o);
    std::vector<std::size_t> b_back(n);
    for (std::size_t k = 0; k < n; ++k) b_back[perm[k]] = b.assignments[k];
    CHECK(adjusted_rand_index(a.assignments, b_back) == doctest::Approx(1.0));
  }
}

TEST_CASE("planted three-blob scene is recovered exactly") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SceneOptions so;
    so.seed = seed;
    const auto scene = generate_scene(so);
    const auto c = cluster(scene.features, scene.saliency, 3, seed);
    CAPTURE(seed);
    CHECK(adjusted_rand_index(c.assignments, scene.labels) == 1.0);
  }
}
