// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0
//
// Contribution objective and total training loss.
//
// A confidence head scores a D-dimensional token under a text context c:
//
//   p(token) = logistic(w . (token * c) + b),   c = W_p^T h
//
// The contribution objective is mean_pixel log p_pixel + lambda *
// mean_semantic log p_sema, and the total loss is
//
//   L = L_task + lambda_d * L_pixel + lambda_t * L_sema
//
// with L_pixel, L_sema the negated means of the two log-likelihood terms.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "adata/fusion.hpp"
#include "adata/matrix.hpp"
#include "adata/tensors.hpp"

namespace adata {

struct ConfidenceHead {
  std::vector<double> w;
  double b = 0.0;
};

struct LossWeights {
  double lambda = 1.0;    // semantic weight inside the contribution objective
  double lambda_d = 0.1;  // pixel term in the total loss
  double lambda_t = 0.1;  // semantic term in the total loss
};

struct LossBreakdown {
  double task = 0.0;
  double pixel = 0.0;
  double sema = 0.0;
  double total = 0.0;
  LossWeights lambdas;
};

struct LinearClassifier {
  Matrix weight;             // classes x D
  std::vector<double> bias;  // classes
};

/// Text context c = W_p^T h that modulates tokens before scoring.
std::vector<double> text_context(std::span<const double> descriptor, const Matrix& W_p);

/// log logistic(z), stable for large |z|.
double log_sigmoid(double z);

/// Head logit w . (token * context) + b.
double head_logit(std::span<const double> token, std::span<const double> context,
                  const ConfidenceHead& head);

/// logistic(head_logit), kept inside the open interval (0, 1).
double likelihood(std::span<const double> token, std::span<const double> context,
                  const ConfidenceHead& head);

/// mean log p_pixel + lambda * mean log p_sema over precomputed likelihoods.
/// Throws EmptyTokenSet when either set is empty.
double contribution_objective(std::span<const double> pixel_likelihoods,
                              std::span<const double> semantic_likelihoods, double lambda);

struct ContributionTerms {
  double pixel = 0.0;  // L_pixel = -mean log p_pixel
  double sema = 0.0;   // L_sema  = -mean log p_sema
  double objective(double lambda) const { return -pixel - lambda * sema; }
};

/// Scores both token sets with their heads. Throws EmptyTokenSet.
ContributionTerms contribution_terms(std::span<const std::vector<double>> pixel_tokens,
                                     std::span<const std::vector<double>> semantic_tokens,
                                     std::span<const double> context, const ConfidenceHead& pixel_head,
                                     const ConfidenceHead& semantic_head);

/// Throws InvalidArgument for negative lambdas.
LossBreakdown total_loss(double task_loss, double pixel_loss, double sema_loss, const LossWeights& weights);

/// Cross-entropy of softmax(W mean(tokens) + b) at `label`. Throws
/// EmptyTokenSet, InvalidArgument for a label out of range.
double synthetic_task_loss(const TokenSequence& sequence, std::size_t label,
                           const LinearClassifier& classifier);

// ---------------------------------------------------------------------------
// Head training. Pooling and clustering run once per scene beforehand; their
// outputs enter training as fixed inputs.

struct HeadSample {
  std::vector<std::vector<double>> pixel_features;     // raw C-dim, before projection
  std::vector<std::vector<double>> semantic_features;  // raw C-dim, before projection
  std::vector<std::vector<double>> text_tokens;        // D-dim
  std::vector<double> context;                         // D-dim
  std::size_t label = 0;
  std::size_t gamma = 0;
};

struct HeadModel {
  ConfidenceHead pixel_head;
  ConfidenceHead semantic_head;
  LinearClassifier classifier;
  ProjectorBank projector;

  /// Flat view in the order pixel head (w, b), semantic head (w, b),
  /// classifier (weight, bias), then projector maps (weight, bias) when
  /// `with_projector` is set.
  std::size_t parameter_count(bool with_projector) const;
  double& parameter(std::size_t index);
  double parameter(std::size_t index) const;
};

/// Zero heads and classifier around an existing projector bank.
HeadModel init_head_model(std::size_t num_classes, ProjectorBank projector);

/// Mean over samples of the per-sample total loss; `breakdown` receives the
/// mean of each component.
double head_loss(const HeadModel& model, std::span<const HeadSample> samples, const LossWeights& weights,
                 LossBreakdown* breakdown = nullptr);

/// head_loss plus its gradient. Projector gradients are filled only when
/// `with_projector` is set.
double head_loss_gradient(const HeadModel& model, std::span<const HeadSample> samples,
                          const LossWeights& weights, bool with_projector, HeadModel& gradient);

struct HeadHyper {
  double lr = 0.5;
  std::size_t steps = 500;
  bool train_projector = false;
};

struct HeadTrainResult {
  HeadModel model;
  std::vector<LossBreakdown> trace;  // loss before each step, plus final
};

/// Full-batch gradient descent. Throws EmptyCorpus, InvalidArgument for
/// negative lr.
HeadTrainResult train_heads(std::span<const HeadSample> samples, const HeadModel& init,
                            const LossWeights& weights, const HeadHyper& hyper);

}  // namespace adata
