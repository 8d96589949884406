// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numeric>
#include <vector>

#include "adata/config.hpp"
#include "adata/controller.hpp"
#include "adata/error.hpp"
#include "adata/pipeline.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace adata;

namespace {

ControllerParams identity_params(std::size_t dim) {
  ControllerParams p;
  p.W_p = Matrix::identity(dim);
  p.W1 = Matrix::identity(dim);
  p.b1.assign(dim, 0.0);
  p.W2 = Matrix(2, dim, 0.0);
  p.b2.assign(2, 0.0);
  p.profiles = {{1, 1, 0}, {1, 2, 1}};
  return p;
}

ControllerParams random_params(Rng& rng, const ControllerDims& dims, std::size_t n) {
  std::vector<GranularityProfile> profiles;
  for (std::size_t k = 0; k < n; ++k) profiles.push_back({1, k + 1, k});
  ControllerParams p = init_controller(dims, profiles, rng.next_u64());
  for (double& b : p.b1) b = rng.uniform(-0.5, 0.5);
  for (double& b : p.b2) b = rng.uniform(-0.5, 0.5);
  return p;
}

GranularityDistribution dist_of(std::vector<double> probs) {
  GranularityDistribution d;
  d.probs = std::move(probs);
  for (std::size_t k = 0; k < d.probs.size(); ++k) d.profiles.push_back({k + 1, 10 * (k + 1), k});
  return d;
}

}  // namespace

TEST_CASE("surrogate encoder") {
  const std::vector<TokenId> ids = {5, 9, 2};
  const auto a = encode_text_surrogate(ids, 16, 7);
  const auto b = encode_text_surrogate(ids, 16, 7);
  CHECK(a.vectors == b.vectors);

  const std::vector<TokenId> single = {42};
  const auto s = encode_text_surrogate(single, 64, 1);
  double norm2 = 0.0;
  for (double x : s.vectors[0]) norm2 += x * x;
  CHECK(std::abs(std::sqrt(norm2) - 1.0) <= 1e-9);

  // Position i is scaled by 1/(1+i).
  const std::vector<TokenId> pair = {3, 4};
  const std::vector<TokenId> swapped = {4, 3};
  const auto e1 = encode_text_surrogate(pair, 8, 0);
  const auto e2 = encode_text_surrogate(swapped, 8, 0);
  CHECK(e1.vectors != e2.vectors);
  for (std::size_t d = 0; d < 8; ++d) CHECK(std::abs(e2.vectors[1][d] - 0.5 * e1.vectors[0][d]) <= 1e-15);

  CHECK_THROWS_AS(encode_text_surrogate(std::vector<TokenId>{}, 8, 0), Error);
}

TEST_CASE("aggregate examples") {
  ControllerParams p = identity_params(3);
  TextEmbedding zero{{{0, 0, 0}, {0, 0, 0}}};
  CHECK(aggregate(zero, p) == std::vector<double>{0, 0, 0});

  TextEmbedding one{{{0.2, -0.4, 1.5}}};
  const auto h1 = aggregate(one, p);
  for (std::size_t d = 0; d < 3; ++d) CHECK(h1[d] == doctest::Approx(std::tanh(one.vectors[0][d])).epsilon(1e-15));

  TextEmbedding constant{{{0.5, -1.0, 2.0}, {0.5, -1.0, 2.0}, {0.5, -1.0, 2.0}}};
  const auto h = aggregate(constant, p);
  CHECK(h[0] == doctest::Approx(0.46211715726000974).epsilon(1e-12));
  CHECK(h[1] == doctest::Approx(-0.7615941559557649).epsilon(1e-12));
  CHECK(h[2] == doctest::Approx(0.9640275800758169).epsilon(1e-12));

  TextEmbedding wrong{{{1, 2}}};
  CHECK_THROWS_AS(aggregate(wrong, p), Error);
}

TEST_CASE("softmax and predict examples") {
  const auto u = softmax(std::vector<double>{1.3, 1.3, 1.3, 1.3});
  for (double p : u) CHECK(p == doctest::Approx(0.25).epsilon(1e-15));

  const auto p = softmax(std::vector<double>{2, 0, 0});
  CHECK(p[0] == doctest::Approx(0.7870).epsilon(1e-4));
  CHECK(p[1] == doctest::Approx(0.1065).epsilon(1e-3));
  CHECK(p[2] == doctest::Approx(0.1065).epsilon(1e-3));

  const std::vector<double> logits = {0.3, -1.2, 2.2};
  const auto base = softmax(logits);
  std::vector<double> shifted = logits;
  for (double& z : shifted) z += 123.0;
  const auto moved = softmax(shifted);
  for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(base[k] - moved[k]) <= 1e-12);

  ControllerParams params = identity_params(3);
  CHECK_THROWS_AS(predict(std::vector<double>{1, 2}, params), Error);
}

TEST_CASE("select and expected_profile examples") {
  CHECK(select_profile(dist_of({0.1, 0.8, 0.1})) == GranularityProfile{2, 20, 1});
  CHECK(select_profile(dist_of({0.5, 0.5})) == GranularityProfile{1, 10, 0});

  const auto onehot = expected_profile(dist_of({0, 0, 1}));
  CHECK(onehot == std::array<double, 3>{3, 30, 2});

  GranularityDistribution u;
  u.probs = {0.5, 0.5};
  u.profiles = {{1, 5, 0}, {4, 50, 1}};
  CHECK(expected_profile(u)[0] == 2.5);
  u.probs = {0.25, 0.75};
  CHECK(expected_profile(u)[1] == 38.75);
}

TEST_CASE("predict is a distribution for arbitrary finite params") {
  Rng rng(17);
  const ControllerDims dims{6, 4, 5};
  for (int trial = 0; trial < 200; ++trial) {
    ControllerParams p = random_params(rng, dims, 2 + rng.below(4));
    for (double& w : p.W2.data()) w *= rng.uniform(0.0, 50.0);
    const auto h = testing::random_vector(rng, dims.descriptor_dim, -5, 5);
    const auto d = predict(h, p);
    const double total = std::accumulate(d.probs.begin(), d.probs.end(), 0.0);
    CHECK(std::abs(total - 1.0) <= 1e-9);
    for (double q : d.probs) CHECK(q >= 0.0);
  }
}

TEST_CASE("argmax survives shifts and positive scaling") {
  Rng rng(23);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto z = testing::random_vector(rng, 2 + rng.below(6), -10, 10);
    const std::size_t base = argmax_index(softmax(z));
    const double shift = rng.uniform(-100, 100);
    const double scale = rng.uniform(0.01, 100);
    std::vector<double> t = z;
    for (double& v : t) v = scale * v + shift;
    CHECK(argmax_index(softmax(t)) == base);
  }
}

TEST_CASE("controller gradient matches central differences") {
  Rng rng(29);
  const ControllerDims dims{8, 5, 7};
  const ControllerParams p = random_params(rng, dims, 3);
  const auto corpus = make_synthetic_corpus(3, 4, 5);
  const auto examples = encode_corpus(corpus, dims.text_dim, 7);
  ControllerParams grad;
  controller_loss_gradient(p, examples, grad);
  ControllerParams probe = p;
  for (int i = 0; i < 20; ++i) {
    const std::size_t idx = rng.below(p.parameter_count());
    const double numeric =
        testing::central_difference([&] { return controller_loss(probe, examples); }, probe.parameter(idx));
    CAPTURE(idx);
    CHECK(testing::relative_error(grad.parameter(idx), numeric) <= 1e-4);
  }
}

TEST_CASE("training with lr = 0 is the identity") {
  const auto corpus = make_synthetic_corpus(3, 5, 1);
  const auto init = init_controller({}, default_profiles(), 4);
  const auto result = train_controller(corpus, init, {0.0, 10, 7});
  CHECK(result.params == init);
  CHECK(result.loss_trace.size() == 11);
}

TEST_CASE("training errors") {
  const auto init = init_controller({}, default_profiles(), 4);
  CHECK_THROWS_AS(train_controller(GranularityCorpus{}, init, {}), Error);
  const auto corpus = make_synthetic_corpus(3, 2, 1);
  CHECK_THROWS_AS(train_controller(corpus, init, {-0.1, 1, 7}), Error);
}

TEST_CASE("single example converges to its label") {
  GranularityCorpus corpus;
  corpus.items.push_back({{3, 1, 4}, {1.0, 0.0}});
  const auto init = init_controller({16, 8, 8}, {{1, 2, 0}, {2, 4, 1}}, 2);
  const auto result = train_controller(corpus, init, {0.5, 500, 7});
  const auto e = encode_text_surrogate(corpus.items[0].token_ids, 16, 7);
  const auto d = predict(aggregate(e, result.params), result.params);
  CHECK(d.probs[0] >= 0.99);
}

TEST_CASE("synthetic corpus construction") {
  const auto a = make_synthetic_corpus(3, 10, 9);
  const auto b = make_synthetic_corpus(3, 10, 9);
  REQUIRE(a.items.size() == 30);
  for (std::size_t i = 0; i < a.items.size(); ++i) {
    CHECK(a.items[i].token_ids == b.items[i].token_ids);
    CHECK(a.items[i].label == b.items[i].label);
    CHECK(std::abs(std::accumulate(a.items[i].label.begin(), a.items[i].label.end(), 0.0) - 1.0) <= 1e-9);
  }
  CHECK(a.items[0].label == std::vector<double>{0.8, 0.1, 0.1});
  CHECK(corpus_class(a.items[0]) == 0);
  CHECK(corpus_class(a.items[29]) == 2);
}

TEST_CASE("trained default controller: accuracy, monotone loss, keyword questions") {
  const PipelineConfig config;
  std::vector<double> trace;
  const ControllerModel model = train_default_controller(config, &trace);
  for (std::size_t e = 0; e + 5 < trace.size(); ++e) CHECK(trace[e + 5] <= trace[e] + 1e-12);

  const auto held_out = make_synthetic_corpus(3, 200, 1234);
  CHECK(controller_accuracy(model.params, held_out, model.encoder_seed) >= 0.95);

  const auto& vocab = Vocabulary::builtin();
  auto choose = [&](const char* q) {
    const auto e = encode_text_surrogate(vocab.tokenize(q), config.model_dim, model.encoder_seed);
    return select_profile(predict(aggregate(e, model.params), model.params));
  };
  CHECK(choose("What animals are in the image?") == GranularityProfile{4, 5, 0});
  CHECK(choose("How many objects are in the scene?") == GranularityProfile{4, 5, 0});
  CHECK(choose("What color is the dog's ear?") == GranularityProfile{1, 50, 2});
}
