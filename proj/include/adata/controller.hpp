// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0
//
// Text-conditioned granularity controller.
//
//   u      = tanh(mean_i E_i)               (E: per-token text states)
//   h      = W_p u                          (compact descriptor, dim d_c)
//   logits = W2 relu(W1 h + b1) + b2        (one logit per profile)
//   p      = softmax(logits)
//
// The selected profile is argmax p (lowest index on ties). Training minimizes
// soft-label cross-entropy with full-batch gradient descent.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "adata/matrix.hpp"
#include "adata/tensors.hpp"
#include "adata/vocabulary.hpp"

namespace adata {

enum class EmbeddingSource { Surrogate, External };

struct TextEmbedding {
  std::vector<std::vector<double>> vectors;
  EmbeddingSource source = EmbeddingSource::Surrogate;

  std::size_t length() const noexcept { return vectors.size(); }
  std::size_t dim() const noexcept { return vectors.empty() ? 0 : vectors.front().size(); }
  /// Throws EmptyQuestion / DimensionMismatch / NonFinite.
  void validate() const;
};

struct ControllerParams {
  Matrix W_p;                 // d_c x D_t
  Matrix W1;                  // d_h x d_c
  std::vector<double> b1;     // d_h
  Matrix W2;                  // n x d_h
  std::vector<double> b2;     // n
  std::vector<GranularityProfile> profiles;

  std::size_t text_dim() const noexcept { return W_p.cols(); }
  std::size_t descriptor_dim() const noexcept { return W_p.rows(); }
  std::size_t hidden_dim() const noexcept { return W1.rows(); }
  std::size_t num_profiles() const noexcept { return profiles.size(); }

  /// Flat view over every trainable scalar in the order W_p, W1, b1, W2, b2.
  std::size_t parameter_count() const noexcept;
  double& parameter(std::size_t index);
  double parameter(std::size_t index) const;

  /// Throws InvalidArgument / DimensionMismatch / NonFinite.
  void validate() const;

  friend bool operator==(const ControllerParams&, const ControllerParams&) = default;
};

struct ControllerDims {
  std::size_t text_dim = 64;
  std::size_t descriptor_dim = 32;
  std::size_t hidden_dim = 64;
};

/// coarse (4, 5, 0), medium (2, 20, 1), fine (1, 50, 2).
std::vector<GranularityProfile> default_profiles();

/// Gaussian init, biases zero. W_p has unit-variance entries (the pooled text
/// state has norm well below one), W1 uses He scaling for the ReLU, W2 uses
/// std 3/sqrt(fan_in) so initial logits are not all near zero.
ControllerParams init_controller(const ControllerDims& dims,
                                 std::vector<GranularityProfile> profiles, std::uint64_t seed);

struct GranularityDistribution {
  std::vector<double> probs;
  std::vector<GranularityProfile> profiles;
};

/// Deterministic stand-in for a language-model first block: each id maps to a
/// fixed pseudo-random unit vector, scaled by 1 / (1 + position).
TextEmbedding encode_text_surrogate(std::span<const TokenId> token_ids, std::size_t dim,
                                    std::uint64_t seed);

/// tanh of the mean text state; the parameter-free half of aggregate().
std::vector<double> pooled_text_state(const TextEmbedding& embedding);

/// h = W_p tanh(mean E).
std::vector<double> aggregate(const TextEmbedding& embedding, const ControllerParams& params);

std::vector<double> controller_logits(std::span<const double> descriptor,
                                      const ControllerParams& params);

/// Numerically stable softmax.
std::vector<double> softmax(std::span<const double> logits);

GranularityDistribution predict(std::span<const double> descriptor, const ControllerParams& params);

/// Index of the largest entry, lowest index on ties.
std::size_t argmax_index(std::span<const double> values);

GranularityProfile select_profile(const GranularityDistribution& dist);

/// Probability-weighted mean (alpha, beta, gamma).
std::array<double, 3> expected_profile(const GranularityDistribution& dist);

struct CorpusItem {
  std::vector<TokenId> token_ids;
  std::vector<double> label;  // soft label over profiles
};

struct GranularityCorpus {
  std::vector<CorpusItem> items;
  /// Throws EmptyCorpus / BadFormat (label not a distribution or lengths differ).
  void validate(std::size_t num_profiles) const;
};

/// Questions drawn from class keyword pools (coarse: scene / counting words,
/// medium: layout words, fine: colour / texture / part words) mixed with shared
/// question words and nouns. Labels put 0.8 on the true class and spread the
/// rest uniformly. Items are emitted class by class.
GranularityCorpus make_synthetic_corpus(std::size_t num_profiles, std::size_t items_per_class,
                                        std::uint64_t seed);

/// True class of a synthetic item (argmax of its label).
std::size_t corpus_class(const CorpusItem& item);

struct ControllerHyper {
  double lr = 0.05;
  std::size_t epochs = 4000;
  std::uint64_t seed = 7;  // surrogate text-encoder seed
};

struct ControllerTrainResult {
  ControllerParams params;
  std::vector<double> loss_trace;  // loss before each epoch's update, plus final
};

/// Pre-encoded training example: the pooled text state and its soft label.
struct ControllerExample {
  std::vector<double> pooled;
  std::vector<double> label;
};

std::vector<ControllerExample> encode_corpus(const GranularityCorpus& corpus,
                                             std::size_t text_dim, std::uint64_t seed);

/// Mean soft-label cross-entropy over the examples.
double controller_loss(const ControllerParams& params, std::span<const ControllerExample> examples);

/// Loss and its gradient; the gradient shares the params' shape.
double controller_loss_gradient(const ControllerParams& params,
                                std::span<const ControllerExample> examples,
                                ControllerParams& gradient);

/// Throws EmptyCorpus, or InvalidArgument for negative lr. lr == 0 returns
/// the initial params unchanged.
ControllerTrainResult train_controller(const GranularityCorpus& corpus, const ControllerParams& init,
                                       const ControllerHyper& hyper);

/// Fraction of items whose argmax prediction equals their argmax label.
double controller_accuracy(const ControllerParams& params, const GranularityCorpus& corpus,
                           std::uint64_t encoder_seed);

}  // namespace adata
