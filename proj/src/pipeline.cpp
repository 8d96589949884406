// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0

#include "adata/pipeline.hpp"

#include <chrono>
#include <string>

#include "adata/error.hpp"
#include "adata/pooling.hpp"
#include "adata/rng.hpp"
#include "adata/scene.hpp"
#include "adata/selection.hpp"
#include "adata/vocabulary.hpp"

namespace adata {

namespace {

constexpr const char* kModule = "harness";

class StageClock {
 public:
  explicit StageClock(bool enabled) : enabled_(enabled), last_(std::chrono::steady_clock::now()) {}
  void mark(const char* stage) {
    if (!enabled_) return;
    const auto now = std::chrono::steady_clock::now();
    timings_[stage] = std::chrono::duration<double, std::milli>(now - last_).count();
    last_ = now;
  }
  const Json& timings() const { return timings_; }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point last_;
  Json timings_ = Json::object();
};

std::vector<std::vector<double>> grid_rows(const FeatureMap& f) {
  std::vector<std::vector<double>> out;
  out.reserve(f.locations());
  for (std::size_t i = 0; i < f.locations(); ++i) {
    const auto v = f.location(i);
    out.emplace_back(v.begin(), v.end());
  }
  return out;
}

Json budget_json(const TokenBudget& b) {
  return {{"n_pixel", b.n_pixel},
          {"n_semantic", b.n_semantic},
          {"n_text", b.n_text},
          {"total", b.total},
          {"overhead_ratio", b.overhead_ratio}};
}

}  // namespace

ProjectorBank config_projector(const PipelineConfig& config) {
  return make_projector_bank(config.profiles.size(), config.channels, config.model_dim,
                             derive_seed(config.seed, 0xF0));
}

std::uint64_t cluster_seed(const PipelineConfig& config) { return derive_seed(config.seed, 0xC1); }

PipelineResult run_pipeline(const PipelineConfig& config, const ControllerModel* controller,
                            const PipelineInputs& in, const PipelineOptions& options) {
  config.validate();
  StageClock clock(options.timings);
  PipelineResult r;
  const std::size_t side = in.features.side();
  if (side != in.saliency.side()) {
    throw Error(kModule, ErrorCode::DimensionMismatch,
                "features side " + std::to_string(side) + " != saliency side " + std::to_string(in.saliency.side()));
  }
  if (in.features.channels() != config.channels) {
    throw Error(kModule, ErrorCode::DimensionMismatch,
                "features have " + std::to_string(in.features.channels()) + " channels, config expects " +
                    std::to_string(config.channels));
  }
  in.text.validate();

  // Controller.
  if (controller != nullptr) {
    if (controller->params.profiles != config.profiles) {
      throw Error(kModule, ErrorCode::BadConfig, "controller profiles differ from config profiles");
    }
    r.descriptor = aggregate(in.text, controller->params);
    r.distribution = predict(r.descriptor, controller->params);
  }
  if (options.profile_explicit) {
    r.profile = *options.profile_explicit;
    validate_profile(r.profile, config.profiles.size());
  } else if (options.profile_override) {
    if (*options.profile_override >= config.profiles.size()) {
      throw Error(kModule, ErrorCode::BadConfig, "profile index out of range");
    }
    r.profile_index = *options.profile_override;
    r.profile = config.profiles[*r.profile_index];
  } else if (r.distribution) {
    r.profile_index = argmax_index(r.distribution->probs);
    r.profile = select_profile(*r.distribution);
  } else {
    throw Error(kModule, ErrorCode::BadConfig, "no controller and no forced profile");
  }
  clock.mark("controller");

  // Pooling.
  const PoolKernel kernel = build_kernel(side, r.profile.alpha);
  r.pooled_features = pool_features(in.features, kernel);
  r.pooled_saliency = pool_saliency(in.saliency, kernel);
  clock.mark("pooling");

  // Clustering.
  r.descriptors = make_descriptors(r.pooled_features, r.pooled_saliency, config.saliency_weight);
  r.clustering = cluster_tokens(r.descriptors, r.profile.beta, cluster_seed(config), config.cluster_options());
  clock.mark("clustering");

  // Selection.
  std::vector<double> composite;
  for (const auto& c : r.clustering.centroids) {
    r.scores.push_back(score_cluster(c.members, r.descriptors, config.eta));
    composite.push_back(r.scores.back().composite);
  }
  r.k = config.k_rule.resolve(r.profile.beta, r.clustering.centroids.size());
  r.selected = select_topk(composite, r.k);
  r.semantic = emit_semantic_tokens(r.clustering, r.selected, r.descriptors, r.scores);
  clock.mark("selection");

  // Fusion.
  const ProjectorBank bank = config_projector(config);
  r.pixel_features = grid_rows(config.pool_pixel_stream ? r.pooled_features : in.features);
  const auto pixel_tokens = project(r.pixel_features, bank, r.profile.gamma);
  const auto semantic_tokens = project(r.semantic.tokens, bank, r.profile.gamma);
  if (in.text.dim() != config.model_dim) {
    throw Error("fusion", ErrorCode::DimensionMismatch,
                "text dim " + std::to_string(in.text.dim()) + " != model dim " + std::to_string(config.model_dim));
  }
  r.mix = assemble(pixel_tokens, semantic_tokens, in.text.vectors);
  r.budget = token_budget(r.mix);
  clock.mark("fusion");

  // Report.
  Json& j = r.report;
  j["format"] = "adata.pipeline/1";
  j["config"] = to_json(config);
  j["input"] = {{"grid_side", side},
                {"channels", in.features.channels()},
                {"question_ids", in.question_ids},
                {"text_source", in.text.source == EmbeddingSource::Surrogate ? "surrogate" : "external"},
                {"text_tokens", in.text.length()}};
  if (r.distribution) {
    Json dist;
    dist["probs"] = r.distribution->probs;
    const auto e = expected_profile(*r.distribution);
    dist["expected_profile"] = {{"alpha", e[0]}, {"beta", e[1]}, {"gamma", e[2]}};
    j["distribution"] = dist;
  } else {
    j["distribution"] = nullptr;
  }
  Json sel = to_json(r.profile);
  sel["index"] = r.profile_index ? Json(*r.profile_index) : Json(nullptr);
  sel["forced"] = options.profile_override.has_value() || options.profile_explicit.has_value();
  j["selected_profile"] = sel;
  j["pooling"] = {{"side_in", side}, {"side_out", kernel.side_out}, {"alpha", kernel.alpha}};
  Json sizes = Json::array();
  for (const auto& c : r.clustering.centroids) sizes.push_back(c.members.size());
  j["clustering"] = {{"num_tokens", r.descriptors.size()},
                     {"num_clusters", r.clustering.centroids.size()},
                     {"seed", r.clustering.seed},
                     {"iterations", r.clustering.iterations},
                     {"final_objective", r.clustering.final_objective},
                     {"objective_trace", r.clustering.objective_trace},
                     {"sizes", sizes}};
  Json scores = Json::array();
  for (std::size_t c = 0; c < r.scores.size(); ++c) {
    scores.push_back({{"cluster", c},
                      {"size", r.scores[c].size_score},
                      {"coherence", r.scores[c].coherence_score},
                      {"dispersion", r.scores[c].dispersion_score},
                      {"composite", r.scores[c].composite}});
  }
  j["selection"] = {{"k_rule", config.k_rule.to_string()}, {"k", r.k}, {"selected", r.selected}, {"scores", scores}};
  j["token_budget"] = budget_json(r.budget);
  if (options.timings) j["timings_ms"] = clock.timings();
  return r;
}

HeadSample make_head_sample(const PipelineResult& result, const ControllerModel& controller, std::size_t label) {
  if (result.descriptor.empty()) {
    throw Error(kModule, ErrorCode::InvalidArgument, "head samples need a controller descriptor");
  }
  HeadSample s;
  s.pixel_features = result.pixel_features;
  s.semantic_features = result.semantic.tokens;
  for (std::size_t i = 0; i < result.mix.size(); ++i) {
    if (result.mix.roles[i] == TokenRole::Text) s.text_tokens.push_back(result.mix.tokens[i]);
  }
  s.context = text_context(result.descriptor, controller.params.W_p);
  s.label = label;
  s.gamma = result.profile.gamma;
  return s;
}

std::vector<HeadSample> planted_head_samples(const PipelineConfig& config, const ControllerModel& controller,
                                             const std::string& question, std::size_t count,
                                             std::size_t profile_index) {
  if (count == 0) throw Error(kModule, ErrorCode::EmptyCorpus, "need at least one scene");
  const auto ids = Vocabulary::builtin().tokenize(question);
  const TextEmbedding text = encode_text_surrogate(ids, config.model_dim, controller.encoder_seed);
  PipelineOptions opts;
  opts.profile_override = profile_index;
  std::vector<HeadSample> samples;
  for (std::size_t s = 0; s < count; ++s) {
    SceneOptions so;
    so.side = config.grid_side;
    so.channels = config.channels;
    so.class_label = s % 2;
    so.seed = derive_seed(config.seed, 0x7A + s);
    const SyntheticScene scene = generate_scene(so);
    const PipelineResult r = run_pipeline(config, &controller, {scene.features, scene.saliency, text, ids}, opts);
    samples.push_back(make_head_sample(r, controller, scene.class_label));
  }
  return samples;
}

ControllerModel train_default_controller(const PipelineConfig& config, std::vector<double>* loss_trace) {
  config.validate();
  const auto corpus =
      make_synthetic_corpus(config.profiles.size(), config.controller.items_per_class, config.controller.corpus_seed);
  const auto init = init_controller(config.controller_dims, config.profiles, config.controller.init_seed);
  ControllerHyper hyper;
  hyper.lr = config.controller.lr;
  hyper.epochs = config.controller.epochs;
  hyper.seed = config.encoder_seed;
  auto trained = train_controller(corpus, init, hyper);
  if (loss_trace != nullptr) *loss_trace = std::move(trained.loss_trace);
  return {std::move(trained.params), config.encoder_seed};
}

}  // namespace adata
