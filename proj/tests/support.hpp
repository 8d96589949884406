// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0
//
// Oracles and generators shared by the unit and acceptance tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "adata/clustering.hpp"
#include "adata/rng.hpp"

namespace adata::testing {

/// |a - n| / max(|a|, |n|, floor). The floor keeps coordinates whose true
/// derivative is zero (dead ReLU units, unused rows) from dividing by noise.
inline double relative_error(double analytic, double numeric, double floor = 1e-6) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

/// Central difference of f around *x with step h; restores *x.
inline double central_difference(const std::function<double()>& f, double& x, double h = 1e-5) {
  const double saved = x;
  x = saved + h;
  const double up = f();
  x = saved - h;
  const double down = f();
  x = saved;
  return (up - down) / (2.0 * h);
}

inline std::vector<double> random_vector(Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

/// Random descriptors with coords in [0,1]^2, saliency in [0,1], features in
/// [-1,1]^dim.
inline std::vector<TokenDescriptor> random_tokens(Rng& rng, std::size_t n, std::size_t dim) {
  std::vector<TokenDescriptor> out(n);
  for (auto& t : out) {
    t.saliency = rng.uniform();
    t.attention = {rng.uniform(), rng.uniform(), t.saliency};
    t.feature = random_vector(rng, dim);
  }
  return out;
}

/// Exhaustive optimum of the clustering objective over every assignment of
/// tokens to m non-empty clusters, each scored against its member means.
inline double brute_force_optimum(std::span<const TokenDescriptor> tokens, std::size_t m, double lambda_f) {
  const std::size_t n = tokens.size();
  std::vector<std::size_t> assign(n, 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    std::vector<bool> used(m, false);
    for (std::size_t a : assign) used[a] = true;
    if (std::all_of(used.begin(), used.end(), [](bool u) { return u; })) {
      best = std::min(best, assignment_objective(tokens, assign, m, lambda_f));
    }
    std::size_t i = 0;
    while (i < n && ++assign[i] == m) assign[i++] = 0;
    if (i == n) break;
  }
  return best;
}

}  // namespace adata::testing
