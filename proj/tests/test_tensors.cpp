// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "adata/error.hpp"
#include "adata/tensors.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace adata;

TEST_CASE("flatten_grid coordinates") {
  const FeatureMap one(1, 2, {3.0, 4.0});
  const auto e1 = flatten_grid(one);
  REQUIRE(e1.size() == 1);
  CHECK(e1[0].coord == std::array<double, 2>{0.5, 0.5});
  CHECK(std::vector<double>(e1[0].feature.begin(), e1[0].feature.end()) == std::vector<double>{3.0, 4.0});

  const auto e2 = flatten_grid(FeatureMap::zeros(2, 1));
  REQUIRE(e2.size() == 4);
  CHECK(e2[0].coord == std::array<double, 2>{0.25, 0.25});
  CHECK(e2[1].coord == std::array<double, 2>{0.75, 0.25});
  CHECK(e2[2].coord == std::array<double, 2>{0.25, 0.75});
  CHECK(e2[3].coord == std::array<double, 2>{0.75, 0.75});

  const auto e4 = flatten_grid(FeatureMap::zeros(4, 3));
  CHECK(e4.size() == 16);
  CHECK(e4[0].coord == std::array<double, 2>{0.125, 0.125});
}

TEST_CASE("flatten_grid is a bijection") {
  Rng rng(3);
  for (std::size_t side : {1u, 3u, 8u}) {
    const std::size_t c = 5;
    const FeatureMap f(side, c, testing::random_vector(rng, side * side * c));
    std::vector<double> rebuilt;
    for (const auto& e : flatten_grid(f)) rebuilt.insert(rebuilt.end(), e.feature.begin(), e.feature.end());
    CHECK(rebuilt == f.data());
  }
}

TEST_CASE("FeatureMap rejects bad lengths and non-finite values") {
  CHECK_THROWS_AS(FeatureMap(2, 2, std::vector<double>(7, 0.0)), Error);
  CHECK_THROWS_AS(FeatureMap(1, 1, {std::numeric_limits<double>::quiet_NaN()}), Error);
  CHECK_THROWS_AS(FeatureMap(0, 1, {}), Error);
}

TEST_CASE("normalize_saliency examples") {
  CHECK(normalize_saliency(2, std::vector<double>{1, 1, 1, 1}).data() == std::vector<double>{0.25, 0.25, 0.25, 0.25});
  CHECK(normalize_saliency(2, std::vector<double>{2, 0, 0, 0}).data() == std::vector<double>{1, 0, 0, 0});
  CHECK(normalize_mass(std::vector<double>{1, 3}) == std::vector<double>{0.25, 0.75});
}

TEST_CASE("normalize_saliency errors") {
  try {
    normalize_saliency(2, std::vector<double>{0, 0, 0, 0});
    FAIL("expected AllZeroSaliency");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AllZeroSaliency);
  }
  CHECK_THROWS_AS(normalize_saliency(2, std::vector<double>{1, -1, 0, 0}), Error);
  CHECK_THROWS_AS(normalize_saliency(2, std::vector<double>{1, 1, 1}), Error);
}

TEST_CASE("normalize_saliency: unit mass, idempotent, input untouched") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t side = 1 + rng.below(9);
    auto raw = testing::random_vector(rng, side * side, 0.0, 5.0);
    raw[rng.below(raw.size())] += 0.1;
    const auto copy = raw;
    const SaliencyMap once = normalize_saliency(side, raw);
    CHECK(raw == copy);
    const double total = std::accumulate(once.data().begin(), once.data().end(), 0.0);
    CHECK(std::abs(total - 1.0) <= 1e-9);
    const SaliencyMap twice = normalize_saliency(side, once.data());
    for (std::size_t i = 0; i < raw.size(); ++i) CHECK(std::abs(twice[i] - once[i]) <= 1e-12);
  }
}

TEST_CASE("profiles and token sequences validate") {
  CHECK_NOTHROW(validate_profile({4, 5, 0}, 3));
  CHECK_THROWS_AS(validate_profile({0, 5, 0}, 3), Error);
  CHECK_THROWS_AS(validate_profile({1, 0, 0}, 3), Error);
  CHECK_THROWS_AS(validate_profile({1, 5, 3}, 3), Error);

  TokenSequence seq{{{1, 2}, {3, 4}}, {TokenRole::Pixel}};
  CHECK_THROWS_AS(seq.validate(), Error);
  seq.roles.push_back(TokenRole::Text);
  CHECK_NOTHROW(seq.validate());
  seq.tokens[1].push_back(5);
  CHECK_THROWS_AS(seq.validate(), Error);
}
