// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <string>

#include "adata/error.hpp"
#include "adata/kernels.hpp"
#include "adata/objective.hpp"

namespace adata {

namespace {

constexpr const char* kModule = "objective";

HeadModel zero_like(const HeadModel& m) {
  HeadModel z;
  z.pixel_head.w.assign(m.pixel_head.w.size(), 0.0);
  z.semantic_head.w.assign(m.semantic_head.w.size(), 0.0);
  z.classifier.weight = Matrix(m.classifier.weight.rows(), m.classifier.weight.cols());
  z.classifier.bias.assign(m.classifier.bias.size(), 0.0);
  for (const auto& map : m.projector.maps) {
    z.projector.maps.push_back(
        {Matrix(map.weight.rows(), map.weight.cols()), std::vector<double>(map.bias.size(), 0.0)});
  }
  return z;
}

void check_sample(const HeadModel& model, const HeadSample& s) {
  if (s.pixel_features.empty() || s.semantic_features.empty()) {
    throw Error(kModule, ErrorCode::EmptyTokenSet, "sample needs pixel and semantic tokens");
  }
  if (s.gamma >= model.projector.size()) {
    throw Error(kModule, ErrorCode::BadGamma, "sample gamma " + std::to_string(s.gamma) + " outside bank");
  }
  const std::size_t d = model.projector.output_dim();
  if (s.context.size() != d || model.pixel_head.w.size() != d || model.semantic_head.w.size() != d ||
      model.classifier.weight.cols() != d) {
    throw Error(kModule, ErrorCode::DimensionMismatch, "head, context and projector dims disagree");
  }
  for (const auto& t : s.text_tokens) {
    if (t.size() != d) throw Error(kModule, ErrorCode::DimensionMismatch, "text token dim != projector output");
  }
  if (s.label >= model.classifier.weight.rows()) {
    throw Error(kModule, ErrorCode::InvalidArgument, "label " + std::to_string(s.label) + " out of range");
  }
}

double sigmoid(double z) { return std::exp(log_sigmoid(z)); }

// Per-sample loss; accumulates scaled gradients into `grad` when non-null.
LossBreakdown sample_loss(const HeadModel& model, const HeadSample& s, const LossWeights& weights,
                          double scale, bool with_projector, HeadModel* grad) {
  check_sample(model, s);
  const auto pixel = project(s.pixel_features, model.projector, s.gamma);
  const auto sema = project(s.semantic_features, model.projector, s.gamma);
  const std::size_t d = model.projector.output_dim();
  const double total_tokens = static_cast<double>(pixel.size() + sema.size() + s.text_tokens.size());

  std::vector<double> mean(d, 0.0);
  for (const auto& t : pixel) kernels::axpy(1.0, t, mean);
  for (const auto& t : sema) kernels::axpy(1.0, t, mean);
  for (const auto& t : s.text_tokens) kernels::axpy(1.0, t, mean);
  for (double& v : mean) v /= total_tokens;

  auto logits = matvec(model.classifier.weight, mean);
  for (std::size_t k = 0; k < logits.size(); ++k) logits[k] += model.classifier.bias[k];
  const double peak = *std::max_element(logits.begin(), logits.end());
  double z_sum = 0.0;
  for (double z : logits) z_sum += std::exp(z - peak);
  const double log_norm = peak + std::log(z_sum);

  const ContributionTerms terms =
      contribution_terms(pixel, sema, s.context, model.pixel_head, model.semantic_head);
  LossBreakdown out = total_loss(log_norm - logits[s.label], terms.pixel, terms.sema, weights);
  if (grad == nullptr) return out;

  std::vector<double> dlogits(logits.size());
  for (std::size_t k = 0; k < logits.size(); ++k) dlogits[k] = std::exp(logits[k] - log_norm);
  dlogits[s.label] -= 1.0;
  for (double& v : dlogits) v *= scale;
  add_outer(grad->classifier.weight, 1.0, dlogits, mean);
  kernels::axpy(1.0, dlogits, grad->classifier.bias);
  auto dmean = matvec_transposed(model.classifier.weight, dlogits);
  for (double& v : dmean) v /= total_tokens;

  std::vector<double> modulated(d);
  std::vector<double> head_ctx(d);
  auto head_branch = [&](const std::vector<std::vector<double>>& tokens,
                         const std::vector<std::vector<double>>& raw, const ConfidenceHead& head,
                         ConfidenceHead& ghead, double lambda) {
    const double per_token = scale * lambda / static_cast<double>(tokens.size());
    for (std::size_t k = 0; k < d; ++k) head_ctx[k] = head.w[k] * s.context[k];
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const double coef = per_token * (sigmoid(head_logit(tokens[i], s.context, head)) - 1.0);
      for (std::size_t k = 0; k < d; ++k) modulated[k] = tokens[i][k] * s.context[k];
      kernels::axpy(coef, modulated, ghead.w);
      ghead.b += coef;
      if (!with_projector) continue;
      std::vector<double> dt = dmean;
      kernels::axpy(coef, head_ctx, dt);
      LinearMap& gmap = grad->projector.maps[s.gamma];
      add_outer(gmap.weight, 1.0, dt, raw[i]);
      kernels::axpy(1.0, dt, gmap.bias);
    }
  };
  head_branch(pixel, s.pixel_features, model.pixel_head, grad->pixel_head, weights.lambda_d);
  head_branch(sema, s.semantic_features, model.semantic_head, grad->semantic_head, weights.lambda_t);
  return out;
}

double run(const HeadModel& model, std::span<const HeadSample> samples, const LossWeights& weights,
           bool with_projector, HeadModel* grad, LossBreakdown* breakdown) {
  if (samples.empty()) throw Error(kModule, ErrorCode::EmptyCorpus, "no training samples");
  const double scale = 1.0 / static_cast<double>(samples.size());
  LossBreakdown mean;
  for (const auto& s : samples) {
    const LossBreakdown b = sample_loss(model, s, weights, scale, with_projector, grad);
    mean.task += b.task * scale;
    mean.pixel += b.pixel * scale;
    mean.sema += b.sema * scale;
  }
  mean = total_loss(mean.task, mean.pixel, mean.sema, weights);
  if (breakdown != nullptr) *breakdown = mean;
  return mean.total;
}

void descend(HeadModel& m, const HeadModel& g, double lr, bool with_projector) {
  auto step = [lr](std::vector<double>& p, const std::vector<double>& d) { kernels::axpy(-lr, d, p); };
  step(m.pixel_head.w, g.pixel_head.w);
  m.pixel_head.b -= lr * g.pixel_head.b;
  step(m.semantic_head.w, g.semantic_head.w);
  m.semantic_head.b -= lr * g.semantic_head.b;
  step(m.classifier.weight.data(), g.classifier.weight.data());
  step(m.classifier.bias, g.classifier.bias);
  if (!with_projector) return;
  for (std::size_t k = 0; k < m.projector.maps.size(); ++k) {
    step(m.projector.maps[k].weight.data(), g.projector.maps[k].weight.data());
    step(m.projector.maps[k].bias, g.projector.maps[k].bias);
  }
}

}  // namespace

std::size_t HeadModel::parameter_count(bool with_projector) const {
  std::size_t n = pixel_head.w.size() + 1 + semantic_head.w.size() + 1 + classifier.weight.data().size() +
                  classifier.bias.size();
  if (with_projector) {
    for (const auto& map : projector.maps) n += map.weight.data().size() + map.bias.size();
  }
  return n;
}

double& HeadModel::parameter(std::size_t index) {
  auto take = [&index](std::vector<double>& v) -> double* {
    if (index < v.size()) return &v[index];
    index -= v.size();
    return nullptr;
  };
  auto scalar = [&index](double& v) -> double* {
    if (index == 0) return &v;
    index -= 1;
    return nullptr;
  };
  if (double* p = take(pixel_head.w)) return *p;
  if (double* p = scalar(pixel_head.b)) return *p;
  if (double* p = take(semantic_head.w)) return *p;
  if (double* p = scalar(semantic_head.b)) return *p;
  if (double* p = take(classifier.weight.data())) return *p;
  if (double* p = take(classifier.bias)) return *p;
  for (auto& map : projector.maps) {
    if (double* p = take(map.weight.data())) return *p;
    if (double* p = take(map.bias)) return *p;
  }
  throw Error(kModule, ErrorCode::InvalidArgument, "parameter index out of range");
}

double HeadModel::parameter(std::size_t index) const {
  return const_cast<HeadModel*>(this)->parameter(index);
}

HeadModel init_head_model(std::size_t num_classes, ProjectorBank projector) {
  projector.validate();
  if (num_classes < 2) throw Error(kModule, ErrorCode::InvalidArgument, "need at least two classes");
  const std::size_t d = projector.output_dim();
  HeadModel m;
  m.pixel_head.w.assign(d, 0.0);
  m.semantic_head.w.assign(d, 0.0);
  m.classifier.weight = Matrix(num_classes, d);
  m.classifier.bias.assign(num_classes, 0.0);
  m.projector = std::move(projector);
  return m;
}

double head_loss(const HeadModel& model, std::span<const HeadSample> samples, const LossWeights& weights,
                 LossBreakdown* breakdown) {
  return run(model, samples, weights, false, nullptr, breakdown);
}

double head_loss_gradient(const HeadModel& model, std::span<const HeadSample> samples,
                          const LossWeights& weights, bool with_projector, HeadModel& gradient) {
  gradient = zero_like(model);
  return run(model, samples, weights, with_projector, &gradient, nullptr);
}

HeadTrainResult train_heads(std::span<const HeadSample> samples, const HeadModel& init,
                            const LossWeights& weights, const HeadHyper& hyper) {
  if (samples.empty()) throw Error(kModule, ErrorCode::EmptyCorpus, "no training samples");
  if (!(hyper.lr >= 0.0)) throw Error(kModule, ErrorCode::InvalidArgument, "learning rate must be >= 0");
  HeadTrainResult result{init, {}};
  HeadModel& m = result.model;
  HeadModel grad;
  for (std::size_t step = 0; step < hyper.steps; ++step) {
    LossBreakdown b;
    if (hyper.lr == 0.0) {
      head_loss(m, samples, weights, &b);
      result.trace.push_back(b);
      continue;
    }
    run(m, samples, weights, hyper.train_projector, &(grad = zero_like(m)), &b);
    result.trace.push_back(b);
    descend(m, grad, hyper.lr, hyper.train_projector);
  }
  LossBreakdown final_b;
  head_loss(m, samples, weights, &final_b);
  result.trace.push_back(final_b);
  if (!std::isfinite(final_b.total)) throw Error(kModule, ErrorCode::NonFinite, "head training diverged");
  return result;
}

}  // namespace adata
