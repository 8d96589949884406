// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0

#include "adata/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "adata/error.hpp"
#include "adata/kernels.hpp"

namespace adata {

namespace {

constexpr const char* kModule = "objective";

double mean_log(std::span<const double> likelihoods) {
  double s = 0.0;
  for (double p : likelihoods) s += std::log(p);
  return s / static_cast<double>(likelihoods.size());
}

}  // namespace

std::vector<double> text_context(std::span<const double> descriptor, const Matrix& W_p) {
  return matvec_transposed(W_p, descriptor);
}

double log_sigmoid(double z) {
  return z >= 0.0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z));
}

double head_logit(std::span<const double> token, std::span<const double> context,
                  const ConfidenceHead& head) {
  if (token.size() != context.size() || token.size() != head.w.size()) {
    throw Error(kModule, ErrorCode::DimensionMismatch,
                "token " + std::to_string(token.size()) + ", context " + std::to_string(context.size()) +
                    ", head " + std::to_string(head.w.size()));
  }
  double z = head.b;
  for (std::size_t d = 0; d < token.size(); ++d) z += head.w[d] * token[d] * context[d];
  return z;
}

double likelihood(std::span<const double> token, std::span<const double> context,
                  const ConfidenceHead& head) {
  const double p = std::exp(log_sigmoid(head_logit(token, context, head)));
  return std::clamp(p, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
}

double contribution_objective(std::span<const double> pixel_likelihoods,
                              std::span<const double> semantic_likelihoods, double lambda) {
  if (pixel_likelihoods.empty() || semantic_likelihoods.empty()) {
    throw Error(kModule, ErrorCode::EmptyTokenSet, "contribution objective needs both token sets");
  }
  return mean_log(pixel_likelihoods) + lambda * mean_log(semantic_likelihoods);
}

ContributionTerms contribution_terms(std::span<const std::vector<double>> pixel_tokens,
                                     std::span<const std::vector<double>> semantic_tokens,
                                     std::span<const double> context, const ConfidenceHead& pixel_head,
                                     const ConfidenceHead& semantic_head) {
  if (pixel_tokens.empty() || semantic_tokens.empty()) {
    throw Error(kModule, ErrorCode::EmptyTokenSet, "contribution terms need both token sets");
  }
  ContributionTerms terms;
  for (const auto& t : pixel_tokens) terms.pixel -= log_sigmoid(head_logit(t, context, pixel_head));
  for (const auto& t : semantic_tokens) terms.sema -= log_sigmoid(head_logit(t, context, semantic_head));
  terms.pixel /= static_cast<double>(pixel_tokens.size());
  terms.sema /= static_cast<double>(semantic_tokens.size());
  return terms;
}

LossBreakdown total_loss(double task_loss, double pixel_loss, double sema_loss, const LossWeights& weights) {
  if (weights.lambda < 0.0 || weights.lambda_d < 0.0 || weights.lambda_t < 0.0) {
    throw Error(kModule, ErrorCode::InvalidArgument, "loss weights must be non-negative");
  }
  LossBreakdown out;
  out.task = task_loss;
  out.pixel = pixel_loss;
  out.sema = sema_loss;
  out.lambdas = weights;
  out.total = task_loss + weights.lambda_d * pixel_loss + weights.lambda_t * sema_loss;
  return out;
}

double synthetic_task_loss(const TokenSequence& sequence, std::size_t label,
                           const LinearClassifier& classifier) {
  sequence.validate();
  if (sequence.size() == 0) throw Error(kModule, ErrorCode::EmptyTokenSet, "empty token sequence");
  if (label >= classifier.weight.rows() || classifier.bias.size() != classifier.weight.rows()) {
    throw Error(kModule, ErrorCode::InvalidArgument, "label or classifier shape out of range");
  }
  std::vector<double> mean(sequence.dim(), 0.0);
  for (const auto& t : sequence.tokens) kernels::axpy(1.0, t, mean);
  for (double& v : mean) v /= static_cast<double>(sequence.size());
  auto logits = matvec(classifier.weight, mean);
  for (std::size_t k = 0; k < logits.size(); ++k) logits[k] += classifier.bias[k];
  const double peak = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double z : logits) total += std::exp(z - peak);
  return -(logits[label] - peak - std::log(total));
}

}  // namespace adata
