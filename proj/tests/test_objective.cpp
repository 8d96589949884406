// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <vector>

#include "adata/error.hpp"
#include "adata/objective.hpp"
#include "adata/pipeline.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace adata;

namespace {

std::vector<std::vector<double>> random_rows(Rng& rng, std::size_t n, std::size_t dim) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(testing::random_vector(rng, dim));
  return out;
}

// Small random model with non-zero heads so every gradient path is active.
HeadModel random_model(Rng& rng, std::size_t classes, std::size_t c, std::size_t d, std::size_t gammas) {
  HeadModel m = init_head_model(classes, make_projector_bank(gammas, c, d, rng.next_u64()));
  for (std::size_t i = 0; i < m.parameter_count(true); ++i) m.parameter(i) += rng.uniform(-0.5, 0.5);
  return m;
}

std::vector<HeadSample> random_samples(Rng& rng, std::size_t count, std::size_t classes, std::size_t c,
                                       std::size_t d, std::size_t gammas) {
  std::vector<HeadSample> out;
  for (std::size_t s = 0; s < count; ++s) {
    HeadSample h;
    h.pixel_features = random_rows(rng, 2 + rng.below(5), c);
    h.semantic_features = random_rows(rng, 1 + rng.below(3), c);
    h.text_tokens = random_rows(rng, rng.below(3), d);
    h.context = testing::random_vector(rng, d, -2, 2);
    h.label = rng.below(classes);
    h.gamma = rng.below(gammas);
    out.push_back(std::move(h));
  }
  return out;
}

void gradient_check(bool with_projector) {
  Rng rng(with_projector ? 91 : 90);
  HeadModel model = random_model(rng, 3, 5, 4, 2);
  const auto samples = random_samples(rng, 4, 3, 5, 4, 2);
  LossWeights weights;
  weights.lambda_d = 0.7;
  weights.lambda_t = 0.3;
  HeadModel grad;
  head_loss_gradient(model, samples, weights, with_projector, grad);
  const std::size_t count = model.parameter_count(with_projector);
  for (int probe = 0; probe < 20; ++probe) {
    const std::size_t i = rng.below(count);
    const double numeric =
        testing::central_difference([&] { return head_loss(model, samples, weights); }, model.parameter(i));
    CAPTURE(i);
    CHECK(testing::relative_error(grad.parameter(i), numeric) <= 1e-4);
  }
}

}  // namespace

TEST_CASE("likelihood examples") {
  const std::vector<double> token{0.3, -1.2, 2.0};
  const std::vector<double> ctx{1.0, 0.5, -0.25};
  ConfidenceHead head{{0, 0, 0}, 0.0};
  CHECK(likelihood(token, ctx, head) == 0.5);
  head.b = 20.0;
  CHECK(likelihood(token, ctx, head) >= 0.999999);
  CHECK(likelihood(token, ctx, head) < 1.0);
  head = ConfidenceHead{{1, 0, 0}, 0.7};
  CHECK(head_logit(token, ctx, head) == doctest::Approx(1.0));
  CHECK(likelihood(token, ctx, head) == doctest::Approx(0.7311).epsilon(1e-4));
  head.b = -800.0;
  CHECK(likelihood(token, ctx, head) > 0.0);
}

TEST_CASE("head logit rejects mismatched dimensions") {
  const std::vector<double> token{1, 2};
  const std::vector<double> ctx{1, 2, 3};
  try {
    head_logit(token, ctx, ConfidenceHead{{0, 0}, 0});
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.qualified_code() == "objective.DimensionMismatch");
  }
}

TEST_CASE("log_sigmoid is stable at the extremes") {
  CHECK(log_sigmoid(0.0) == doctest::Approx(std::log(0.5)));
  CHECK(log_sigmoid(1000.0) == 0.0);
  CHECK(log_sigmoid(-1000.0) == doctest::Approx(-1000.0));
  CHECK(std::isfinite(log_sigmoid(-1e300)));
}

TEST_CASE("text context is W_p transposed times h") {
  const Matrix W(2, 3, {1, 2, 3, 4, 5, 6});
  const std::vector<double> h{1, -1};
  CHECK(text_context(h, W) == std::vector<double>{-3, -3, -3});
}

TEST_CASE("contribution objective examples") {
  const std::vector<double> half{0.5, 0.5, 0.5};
  for (double lambda : {0.0, 0.5, 1.0, 3.0}) {
    CHECK(contribution_objective(half, half, lambda) == doctest::Approx((1 + lambda) * std::log(0.5)));
  }
  const std::vector<double> pixel{0.5, 0.25};
  const std::vector<double> sema{0.5};
  CHECK(contribution_objective(pixel, sema, 1.0) == doctest::Approx(-1.7329).epsilon(1e-4));
  CHECK(contribution_objective(pixel, std::vector<double>{0.01}, 0.0) ==
        0.5 * (std::log(0.5) + std::log(0.25)));
  const std::vector<double> none;
  try {
    contribution_objective(none, sema, 1.0);
    FAIL("expected EmptyTokenSet");
  } catch (const Error& e) {
    CHECK(e.qualified_code() == "objective.EmptyTokenSet");
  }
}

TEST_CASE("contribution objective is non-positive and rises with any likelihood") {
  Rng rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    auto pixel = testing::random_vector(rng, 1 + rng.below(10), 0.01, 0.99);
    auto sema = testing::random_vector(rng, 1 + rng.below(10), 0.01, 0.99);
    const double lambda = rng.uniform(0.0, 3.0);
    const double base = contribution_objective(pixel, sema, lambda);
    CHECK(base <= 0.0);
    auto& target = rng.below(2) == 0 || lambda == 0.0 ? pixel : sema;
    double& p = target[rng.below(target.size())];
    p += (1.0 - p) * rng.uniform(0.01, 1.0) * 0.99;
    CHECK(contribution_objective(pixel, sema, lambda) > base);
  }
  const std::vector<double> ones{1.0, 1.0};
  CHECK(contribution_objective(ones, ones, 2.0) == 0.0);
}

TEST_CASE("contribution terms agree with per-token likelihoods") {
  Rng rng(4);
  const auto pixel = random_rows(rng, 5, 3);
  const auto sema = random_rows(rng, 2, 3);
  const auto ctx = testing::random_vector(rng, 3);
  const ConfidenceHead hp{testing::random_vector(rng, 3), 0.2};
  const ConfidenceHead hs{testing::random_vector(rng, 3), -0.4};
  const auto terms = contribution_terms(pixel, sema, ctx, hp, hs);
  std::vector<double> lp, ls;
  for (const auto& t : pixel) lp.push_back(likelihood(t, ctx, hp));
  for (const auto& t : sema) ls.push_back(likelihood(t, ctx, hs));
  CHECK(terms.objective(0.8) == doctest::Approx(contribution_objective(lp, ls, 0.8)).epsilon(1e-12));
}

TEST_CASE("total loss examples") {
  LossWeights w{1.0, 0.0, 0.0};
  CHECK(total_loss(1.25, 3.0, 7.0, w).total == 1.25);
  w = {1.0, 0.5, 0.5};
  const auto b = total_loss(1.0, 0.6931, 0.6931, w);
  CHECK(b.total == doctest::Approx(1.6931));
  CHECK(b.total == b.task + w.lambda_d * b.pixel + w.lambda_t * b.sema);
  // Pixel contribution alone, with lambda_d doubled.
  CHECK(total_loss(0.0, 0.6931, 5.0, LossWeights{1.0, 0.6, 0.0}).total ==
        2.0 * total_loss(0.0, 0.6931, 5.0, LossWeights{1.0, 0.3, 0.0}).total);
  CHECK_THROWS_AS(total_loss(1.0, 1.0, 1.0, LossWeights{1.0, -0.1, 0.0}), Error);
}

TEST_CASE("synthetic task loss examples") {
  TokenSequence seq;
  seq.tokens = {{1.0, 0.0}, {3.0, 0.0}};
  seq.roles = {TokenRole::Pixel, TokenRole::Text};
  LinearClassifier zero{Matrix(3, 2), {0, 0, 0}};
  CHECK(synthetic_task_loss(seq, 1, zero) == doctest::Approx(std::log(3.0)));

  // Mean token (2, 0); first row 0.5 gives logit 1 for class 0.
  LinearClassifier c{Matrix(3, 2, {0.5, 0, 0, 0, 0, 0}), {0, 0, 0}};
  CHECK(synthetic_task_loss(seq, 0, c) == doctest::Approx(0.5514).epsilon(1e-4));

  LinearClassifier sure{Matrix(3, 2), {20, 0, 0}};
  CHECK(synthetic_task_loss(seq, 0, sure) <= 1e-8);

  TokenSequence empty;
  CHECK_THROWS_AS(synthetic_task_loss(empty, 0, zero), Error);
  CHECK_THROWS_AS(synthetic_task_loss(seq, 3, zero), Error);
}

TEST_CASE("total reconstruction identity holds in head training") {
  Rng rng(6);
  const HeadModel model = random_model(rng, 2, 4, 3, 1);
  const auto samples = random_samples(rng, 3, 2, 4, 3, 1);
  LossBreakdown b;
  const LossWeights w{1.0, 0.4, 0.9};
  const double total = head_loss(model, samples, w, &b);
  CHECK(total == b.total);
  CHECK(b.total == b.task + w.lambda_d * b.pixel + w.lambda_t * b.sema);
}

TEST_CASE("analytic gradient matches finite differences without the projector") {
  gradient_check(false);
}

TEST_CASE("analytic gradient matches finite differences with the projector") {
  gradient_check(true);
}

TEST_CASE("projector gradient stays zero unless requested") {
  Rng rng(8);
  const HeadModel model = random_model(rng, 2, 4, 3, 2);
  const auto samples = random_samples(rng, 3, 2, 4, 3, 2);
  HeadModel grad;
  head_loss_gradient(model, samples, LossWeights{}, false, grad);
  const std::size_t heads = model.parameter_count(false);
  for (std::size_t i = heads; i < model.parameter_count(true); ++i) CHECK(grad.parameter(i) == 0.0);
}

TEST_CASE("zero learning rate leaves parameters bitwise unchanged") {
  Rng rng(12);
  const HeadModel model = random_model(rng, 2, 4, 3, 1);
  const auto samples = random_samples(rng, 3, 2, 4, 3, 1);
  HeadHyper hyper;
  hyper.lr = 0.0;
  hyper.steps = 10;
  hyper.train_projector = true;
  const auto r = train_heads(samples, model, LossWeights{}, hyper);
  for (std::size_t i = 0; i < model.parameter_count(true); ++i) CHECK(r.model.parameter(i) == model.parameter(i));
  REQUIRE(r.trace.size() == 11);
  CHECK(r.trace.front().total == r.trace.back().total);
}

TEST_CASE("training rejects empty corpora and negative rates") {
  Rng rng(13);
  const HeadModel model = random_model(rng, 2, 4, 3, 1);
  const std::vector<HeadSample> none;
  try {
    train_heads(none, model, LossWeights{}, HeadHyper{});
    FAIL("expected EmptyCorpus");
  } catch (const Error& e) {
    CHECK(e.qualified_code() == "objective.EmptyCorpus");
  }
  const auto samples = random_samples(rng, 1, 2, 4, 3, 1);
  CHECK_THROWS_AS(train_heads(samples, model, LossWeights{}, HeadHyper{-1.0, 1, false}), Error);
}

TEST_CASE("training on two-class planted scenes halves the loss within 500 steps") {
  PipelineConfig config;
  const ControllerModel controller{init_controller(config.controller_dims, config.profiles, config.controller.init_seed),
                                   config.encoder_seed};
  const auto samples = planted_head_samples(config, controller, "what is in this image", 8, 1);
  const HeadModel init = init_head_model(2, config_projector(config));
  HeadHyper hyper;
  hyper.steps = 500;
  const auto r = train_heads(samples, init, config.loss, hyper);
  REQUIRE(r.trace.size() == 501);
  CHECK(r.trace.back().total <= 0.5 * r.trace.front().total);
  CHECK(r.trace.back().total == doctest::Approx(head_loss(r.model, samples, config.loss)));
}
