// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0

#include "adata/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "adata/error.hpp"
#include "adata/kernels.hpp"
#include "adata/rng.hpp"

namespace adata {

namespace {

constexpr std::uint64_t kClassStream = 0xC1A55;

std::vector<double> random_direction(Rng& rng, std::size_t dim) {
  std::vector<double> v(dim);
  double norm = 0.0;
  while (norm == 0.0) {
    for (double& x : v) x = rng.normal();
    norm = std::sqrt(kernels::dot(v, v));
  }
  for (double& x : v) x /= norm;
  return v;
}

// Random signatures at growing radius until every pair is far enough apart.
std::vector<std::vector<double>> make_signatures(Rng& rng, std::size_t groups, std::size_t dim, double min_gap) {
  double radius = std::max(min_gap, 1e-9);
  while (true) {
    for (int attempt = 0; attempt < 200; ++attempt) {
      std::vector<std::vector<double>> sig;
      bool ok = true;
      for (std::size_t g = 0; g < groups && ok; ++g) {
        auto v = random_direction(rng, dim);
        for (double& x : v) x *= radius;
        for (const auto& other : sig) {
          if (std::sqrt(kernels::squared_distance(v, other)) < min_gap) ok = false;
        }
        sig.push_back(std::move(v));
      }
      if (ok) return sig;
    }
    radius *= 1.25;
  }
}

}  // namespace

SyntheticScene generate_scene(const SceneOptions& o) {
  if (o.side == 0 || o.channels == 0 || o.groups == 0 || o.groups > o.side * o.side) {
    throw Error("harness", ErrorCode::InvalidArgument, "scene needs side, C, G >= 1 and G <= side^2");
  }
  if (!(o.separation >= 0.0) || !(o.intra_spread >= 0.0) || !(o.footprint_sigma > 0.0)) {
    throw Error("harness", ErrorCode::InvalidArgument, "scene spreads must be non-negative");
  }
  Rng rng(derive_seed(o.seed, 0x5CE));
  const std::size_t n = o.side * o.side;

  // Distinct centre cells via partial Fisher-Yates.
  std::vector<std::size_t> cells(n);
  std::iota(cells.begin(), cells.end(), std::size_t{0});
  for (std::size_t g = 0; g < o.groups; ++g) {
    const std::size_t j = g + rng.below(n - g);
    std::swap(cells[g], cells[j]);
  }

  SyntheticScene scene;
  scene.class_label = o.class_label;
  for (std::size_t g = 0; g < o.groups; ++g) scene.centers.push_back(cell_coord(cells[g], o.side));
  scene.signatures = make_signatures(rng, o.groups, o.channels, o.separation * o.intra_spread);

  Rng class_rng(derive_seed(kClassStream, o.class_label));
  auto offset = random_direction(class_rng, o.channels);
  for (double& x : offset) x *= o.class_shift;

  const double noise_std = o.intra_spread / std::sqrt(static_cast<double>(o.channels));
  const double inv_two_var = 1.0 / (2.0 * o.footprint_sigma * o.footprint_sigma);
  std::vector<double> data(n * o.channels);
  std::vector<double> raw_saliency(n);
  scene.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto xy = cell_coord(i, o.side);
    double best = -1.0;
    double mass = 1e-3;
    for (std::size_t g = 0; g < o.groups; ++g) {
      const double dx = xy[0] - scene.centers[g][0];
      const double dy = xy[1] - scene.centers[g][1];
      const double fp = std::exp(-(dx * dx + dy * dy) * inv_two_var);
      mass += fp;
      if (fp > best) {
        best = fp;
        scene.labels[i] = g;
      }
    }
    raw_saliency[i] = mass;
    const auto& sig = scene.signatures[scene.labels[i]];
    for (std::size_t c = 0; c < o.channels; ++c) {
      data[i * o.channels + c] = sig[c] + offset[c] + noise_std * rng.normal();
    }
  }
  scene.features = FeatureMap(o.side, o.channels, std::move(data));
  scene.saliency = normalize_saliency(o.side, raw_saliency);
  return scene;
}

}  // namespace adata
