// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0

#include "adata/controller.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "adata/error.hpp"
#include "adata/kernels.hpp"
#include "adata/rng.hpp"

namespace adata {

namespace {

constexpr const char* kModule = "controller";

[[noreturn]] void fail(ErrorCode code, const std::string& detail) {
  throw Error(kModule, code, detail);
}

void require_dim(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    fail(ErrorCode::DimensionMismatch,
         std::string(what) + ": got " + std::to_string(got) + ", expected " + std::to_string(want));
  }
}

bool finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

std::vector<double> log_softmax(std::span<const double> logits) {
  const double peak = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double z : logits) total += std::exp(z - peak);
  const double log_total = std::log(total);
  std::vector<double> out(logits.size());
  for (std::size_t k = 0; k < logits.size(); ++k) out[k] = logits[k] - peak - log_total;
  return out;
}

struct Forward {
  std::vector<double> descriptor;
  std::vector<double> pre_activation;
  std::vector<double> hidden;
  std::vector<double> logits;
};

Forward forward(const ControllerParams& params, std::span<const double> pooled) {
  Forward f;
  f.descriptor = matvec(params.W_p, pooled);
  f.pre_activation = matvec(params.W1, f.descriptor);
  f.hidden.resize(f.pre_activation.size());
  for (std::size_t j = 0; j < f.hidden.size(); ++j) {
    f.pre_activation[j] += params.b1[j];
    f.hidden[j] = std::max(0.0, f.pre_activation[j]);
  }
  f.logits = matvec(params.W2, f.hidden);
  for (std::size_t k = 0; k < f.logits.size(); ++k) f.logits[k] += params.b2[k];
  return f;
}

double cross_entropy(std::span<const double> logits, std::span<const double> label) {
  const auto logp = log_softmax(logits);
  double loss = 0.0;
  for (std::size_t k = 0; k < label.size(); ++k) {
    if (label[k] != 0.0) loss -= label[k] * logp[k];
  }
  return loss;
}

ControllerParams zeros_like(const ControllerParams& p) {
  ControllerParams g;
  g.W_p = Matrix(p.W_p.rows(), p.W_p.cols());
  g.W1 = Matrix(p.W1.rows(), p.W1.cols());
  g.b1.assign(p.b1.size(), 0.0);
  g.W2 = Matrix(p.W2.rows(), p.W2.cols());
  g.b2.assign(p.b2.size(), 0.0);
  g.profiles = p.profiles;
  return g;
}

}  // namespace

void TextEmbedding::validate() const {
  if (vectors.empty()) fail(ErrorCode::EmptyQuestion, "text embedding has no tokens");
  const std::size_t d = dim();
  if (d == 0) fail(ErrorCode::DimensionMismatch, "text embedding has zero dimension");
  for (const auto& v : vectors) {
    require_dim(v.size(), d, "text embedding token");
    if (!finite(v)) fail(ErrorCode::NonFinite, "text embedding contains non-finite values");
  }
}

std::size_t ControllerParams::parameter_count() const noexcept {
  return W_p.data().size() + W1.data().size() + b1.size() + W2.data().size() + b2.size();
}

double& ControllerParams::parameter(std::size_t index) {
  for (std::vector<double>* block : {&W_p.data(), &W1.data(), &b1, &W2.data(), &b2}) {
    if (index < block->size()) return (*block)[index];
    index -= block->size();
  }
  fail(ErrorCode::InvalidArgument, "parameter index out of range");
}

double ControllerParams::parameter(std::size_t index) const {
  return const_cast<ControllerParams&>(*this).parameter(index);
}

void ControllerParams::validate() const {
  if (profiles.size() < 2) fail(ErrorCode::InvalidArgument, "controller needs at least 2 profiles");
  require_dim(W1.cols(), W_p.rows(), "W1 columns vs descriptor dim");
  require_dim(b1.size(), W1.rows(), "b1 length");
  require_dim(W2.cols(), W1.rows(), "W2 columns vs hidden dim");
  require_dim(W2.rows(), profiles.size(), "W2 rows vs profile count");
  require_dim(b2.size(), profiles.size(), "b2 length");
  if (!W_p.all_finite() || !W1.all_finite() || !W2.all_finite() || !finite(b1) || !finite(b2)) {
    fail(ErrorCode::NonFinite, "controller parameters contain non-finite values");
  }
  for (const auto& p : profiles) {
    if (p.alpha < 1 || p.beta < 1) fail(ErrorCode::InvalidArgument, "profile alpha/beta must be >= 1");
  }
}

std::vector<GranularityProfile> default_profiles() {
  return {{4, 5, 0}, {2, 20, 1}, {1, 50, 2}};
}

ControllerParams init_controller(const ControllerDims& dims,
                                 std::vector<GranularityProfile> profiles, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0xC0));
  auto gaussian = [&rng](std::size_t rows, std::size_t cols, double gain) {
    Matrix m(rows, cols);
    const double scale = gain / std::sqrt(static_cast<double>(cols));
    for (double& v : m.data()) v = scale * rng.normal();
    return m;
  };
  ControllerParams p;
  p.W_p = gaussian(dims.descriptor_dim, dims.text_dim, std::sqrt(static_cast<double>(dims.text_dim)));
  p.W1 = gaussian(dims.hidden_dim, dims.descriptor_dim, std::numbers::sqrt2);
  p.b1.assign(dims.hidden_dim, 0.0);
  p.W2 = gaussian(profiles.size(), dims.hidden_dim, 3.0);
  p.b2.assign(profiles.size(), 0.0);
  p.profiles = std::move(profiles);
  p.validate();
  return p;
}

TextEmbedding encode_text_surrogate(std::span<const TokenId> token_ids, std::size_t dim,
                                    std::uint64_t seed) {
  if (token_ids.empty()) fail(ErrorCode::EmptyQuestion, "question has no tokens");
  if (dim == 0) fail(ErrorCode::InvalidArgument, "embedding dimension must be positive");
  TextEmbedding e;
  e.source = EmbeddingSource::Surrogate;
  e.vectors.reserve(token_ids.size());
  for (std::size_t i = 0; i < token_ids.size(); ++i) {
    Rng rng(derive_seed(seed, token_ids[i]));
    std::vector<double> v(dim);
    double norm2 = 0.0;
    for (double& x : v) {
      x = rng.normal();
      norm2 += x * x;
    }
    const double scale = 1.0 / (std::sqrt(norm2) * static_cast<double>(1 + i));
    for (double& x : v) x *= scale;
    e.vectors.push_back(std::move(v));
  }
  return e;
}

std::vector<double> pooled_text_state(const TextEmbedding& embedding) {
  embedding.validate();
  std::vector<double> mean(embedding.dim(), 0.0);
  for (const auto& v : embedding.vectors) kernels::axpy(1.0, v, mean);
  const double inv = 1.0 / static_cast<double>(embedding.length());
  for (double& x : mean) x = std::tanh(x * inv);
  return mean;
}

std::vector<double> aggregate(const TextEmbedding& embedding, const ControllerParams& params) {
  embedding.validate();
  require_dim(embedding.dim(), params.text_dim(), "text embedding dim vs W_p columns");
  return matvec(params.W_p, pooled_text_state(embedding));
}

std::vector<double> controller_logits(std::span<const double> descriptor,
                                      const ControllerParams& params) {
  require_dim(descriptor.size(), params.descriptor_dim(), "descriptor dim");
  require_dim(params.W1.cols(), params.descriptor_dim(), "W1 columns");
  require_dim(params.b1.size(), params.W1.rows(), "b1 length");
  require_dim(params.W2.cols(), params.W1.rows(), "W2 columns");
  require_dim(params.b2.size(), params.W2.rows(), "b2 length");
  std::vector<double> hidden = matvec(params.W1, descriptor);
  for (std::size_t j = 0; j < hidden.size(); ++j) hidden[j] = std::max(0.0, hidden[j] + params.b1[j]);
  std::vector<double> logits = matvec(params.W2, hidden);
  for (std::size_t k = 0; k < logits.size(); ++k) logits[k] += params.b2[k];
  return logits;
}

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) fail(ErrorCode::InvalidArgument, "softmax of empty vector");
  const double peak = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double total = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    out[k] = std::exp(logits[k] - peak);
    total += out[k];
  }
  for (double& p : out) p /= total;
  return out;
}

GranularityDistribution predict(std::span<const double> descriptor, const ControllerParams& params) {
  const auto logits = controller_logits(descriptor, params);
  require_dim(logits.size(), params.profiles.size(), "logit count vs profiles");
  return {softmax(logits), params.profiles};
}

std::size_t argmax_index(std::span<const double> values) {
  if (values.empty()) fail(ErrorCode::InvalidArgument, "argmax of empty vector");
  std::size_t best = 0;
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (values[k] > values[best]) best = k;
  }
  return best;
}

GranularityProfile select_profile(const GranularityDistribution& dist) {
  require_dim(dist.probs.size(), dist.profiles.size(), "distribution length");
  return dist.profiles[argmax_index(dist.probs)];
}

std::array<double, 3> expected_profile(const GranularityDistribution& dist) {
  require_dim(dist.probs.size(), dist.profiles.size(), "distribution length");
  std::array<double, 3> g{0.0, 0.0, 0.0};
  for (std::size_t k = 0; k < dist.probs.size(); ++k) {
    const auto& p = dist.profiles[k];
    g[0] += dist.probs[k] * static_cast<double>(p.alpha);
    g[1] += dist.probs[k] * static_cast<double>(p.beta);
    g[2] += dist.probs[k] * static_cast<double>(p.gamma);
  }
  return g;
}

void GranularityCorpus::validate(std::size_t num_profiles) const {
  if (items.empty()) fail(ErrorCode::EmptyCorpus, "corpus has no items");
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& item = items[i];
    const std::string where = "corpus item " + std::to_string(i);
    if (item.token_ids.empty()) fail(ErrorCode::EmptyQuestion, where + " has no tokens");
    if (item.label.size() != num_profiles) {
      fail(ErrorCode::BadFormat, where + " label has " + std::to_string(item.label.size()) +
                                     " entries, expected " + std::to_string(num_profiles));
    }
    double total = 0.0;
    for (double p : item.label) {
      if (!std::isfinite(p) || p < 0.0) fail(ErrorCode::BadFormat, where + " label has negative entry");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) fail(ErrorCode::BadFormat, where + " label does not sum to 1");
  }
}

GranularityCorpus make_synthetic_corpus(std::size_t num_profiles, std::size_t items_per_class,
                                        std::uint64_t seed) {
  if (num_profiles < 2) fail(ErrorCode::InvalidArgument, "synthetic corpus needs >= 2 classes");
  if (items_per_class < 1) fail(ErrorCode::InvalidArgument, "items_per_class must be >= 1");
  const Vocabulary& vocab = Vocabulary::builtin();
  const auto& filler = vocab.filler_ids();
  const auto& nouns = vocab.noun_ids();
  // The leading question word; "what"/"how"/"which"/"is"/"are".
  const std::vector<TokenId> openers = {vocab.id("what"), vocab.id("how"), vocab.id("which"),
                                        vocab.id("is"), vocab.id("are")};
  Rng rng(derive_seed(seed, 0x5C));
  const double off = 0.2 / static_cast<double>(num_profiles - 1);

  GranularityCorpus corpus;
  corpus.items.reserve(num_profiles * items_per_class);
  for (std::size_t k = 0; k < num_profiles; ++k) {
    const auto keywords = vocab.keyword_ids(k);
    for (std::size_t n = 0; n < items_per_class; ++n) {
      // The first keyword follows the question word, sometimes after one filler
      // word; everything else is shuffled.
      std::vector<TokenId> body;
      if (rng.uniform() < 0.5) body.push_back(keywords[rng.below(keywords.size())]);
      if (rng.uniform() < 0.7) body.push_back(nouns[rng.below(nouns.size())]);
      const std::size_t n_filler = 1 + rng.below(3);
      for (std::size_t j = 0; j < n_filler; ++j) body.push_back(filler[rng.below(filler.size())]);
      // Fisher-Yates with our own RNG so the corpus is library-independent.
      for (std::size_t j = body.size(); j > 1; --j) std::swap(body[j - 1], body[rng.below(j)]);

      CorpusItem item;
      item.token_ids.push_back(openers[rng.below(openers.size())]);
      if (rng.uniform() < 0.3) item.token_ids.push_back(filler[rng.below(filler.size())]);
      item.token_ids.push_back(keywords[rng.below(keywords.size())]);
      item.token_ids.insert(item.token_ids.end(), body.begin(), body.end());
      item.label.assign(num_profiles, off);
      item.label[k] = 0.8;
      corpus.items.push_back(std::move(item));
    }
  }
  return corpus;
}

std::size_t corpus_class(const CorpusItem& item) { return argmax_index(item.label); }

std::vector<ControllerExample> encode_corpus(const GranularityCorpus& corpus, std::size_t text_dim,
                                             std::uint64_t seed) {
  std::vector<ControllerExample> out;
  out.reserve(corpus.items.size());
  for (const auto& item : corpus.items) {
    out.push_back({pooled_text_state(encode_text_surrogate(item.token_ids, text_dim, seed)), item.label});
  }
  return out;
}

double controller_loss(const ControllerParams& params, std::span<const ControllerExample> examples) {
  if (examples.empty()) fail(ErrorCode::EmptyCorpus, "no examples");
  double total = 0.0;
  for (const auto& ex : examples) total += cross_entropy(forward(params, ex.pooled).logits, ex.label);
  return total / static_cast<double>(examples.size());
}

double controller_loss_gradient(const ControllerParams& params,
                                std::span<const ControllerExample> examples,
                                ControllerParams& gradient) {
  if (examples.empty()) fail(ErrorCode::EmptyCorpus, "no examples");
  gradient = zeros_like(params);
  const double inv_n = 1.0 / static_cast<double>(examples.size());
  double total = 0.0;
  std::vector<double> d_logits(params.num_profiles());
  std::vector<double> d_pre(params.hidden_dim());
  for (const auto& ex : examples) {
    const Forward f = forward(params, ex.pooled);
    total += cross_entropy(f.logits, ex.label);
    const auto p = softmax(f.logits);
    const double label_mass = std::accumulate(ex.label.begin(), ex.label.end(), 0.0);
    for (std::size_t k = 0; k < p.size(); ++k) d_logits[k] = (p[k] * label_mass - ex.label[k]) * inv_n;

    add_outer(gradient.W2, 1.0, d_logits, f.hidden);
    kernels::axpy(1.0, d_logits, gradient.b2);
    const auto d_hidden = matvec_transposed(params.W2, d_logits);
    for (std::size_t j = 0; j < d_pre.size(); ++j) {
      d_pre[j] = f.pre_activation[j] > 0.0 ? d_hidden[j] : 0.0;
    }
    add_outer(gradient.W1, 1.0, d_pre, f.descriptor);
    kernels::axpy(1.0, d_pre, gradient.b1);
    const auto d_descriptor = matvec_transposed(params.W1, d_pre);
    add_outer(gradient.W_p, 1.0, d_descriptor, ex.pooled);
  }
  return total * inv_n;
}

ControllerTrainResult train_controller(const GranularityCorpus& corpus, const ControllerParams& init,
                                       const ControllerHyper& hyper) {
  init.validate();
  corpus.validate(init.num_profiles());
  if (!(hyper.lr >= 0.0) || !std::isfinite(hyper.lr)) {
    fail(ErrorCode::InvalidArgument, "learning rate must be finite and non-negative");
  }
  const auto examples = encode_corpus(corpus, init.text_dim(), hyper.seed);

  ControllerTrainResult result{init, {}};
  result.loss_trace.reserve(hyper.epochs + 1);
  ControllerParams grad;
  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    if (hyper.lr == 0.0) {
      result.loss_trace.push_back(controller_loss(result.params, examples));
      continue;
    }
    result.loss_trace.push_back(controller_loss_gradient(result.params, examples, grad));
    const std::size_t count = result.params.parameter_count();
    for (std::size_t i = 0; i < count; ++i) result.params.parameter(i) -= hyper.lr * grad.parameter(i);
  }
  result.loss_trace.push_back(controller_loss(result.params, examples));
  if (!result.params.W_p.all_finite() || !result.params.W1.all_finite() ||
      !result.params.W2.all_finite()) {
    fail(ErrorCode::NonFinite, "training diverged");
  }
  return result;
}

double controller_accuracy(const ControllerParams& params, const GranularityCorpus& corpus,
                           std::uint64_t encoder_seed) {
  if (corpus.items.empty()) fail(ErrorCode::EmptyCorpus, "corpus has no items");
  std::size_t correct = 0;
  for (const auto& item : corpus.items) {
    const auto emb = encode_text_surrogate(item.token_ids, params.text_dim(), encoder_seed);
    const auto dist = predict(aggregate(emb, params), params);
    if (argmax_index(dist.probs) == corpus_class(item)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(corpus.items.size());
}

}  // namespace adata
