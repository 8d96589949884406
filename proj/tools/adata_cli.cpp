// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0
//
// adata command-line interface. Every subcommand writes its artifact to --out
// (stdout when omitted). Exit codes: 0 ok, 2 input error, 3 config error,
// 4 numeric failure.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "adata/config.hpp"
#include "adata/corpus_io.hpp"
#include "adata/error.hpp"
#include "adata/kernels.hpp"
#include "adata/model_io.hpp"
#include "adata/pipeline.hpp"
#include "adata/pooling.hpp"
#include "adata/rng.hpp"
#include "adata/scene.hpp"
#include "adata/sweep.hpp"
#include "adata/tensor_io.hpp"

namespace {

using namespace adata;

constexpr int kExitInput = 2;
constexpr int kExitConfig = 3;

std::uint64_t env_seed() {
  const char* v = std::getenv("ADATA_SEED");
  if (v == nullptr || *v == '\0') return 0;
  try {
    std::size_t used = 0;
    const auto seed = std::stoull(v, &used);
    if (used == std::string(v).size()) return seed;
  } catch (const std::exception&) {
  }
  throw Error("cli", ErrorCode::BadConfig, std::string("ADATA_SEED is not an unsigned integer: ") + v);
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    write_text(text, out);
  }
}

void emit(const Json& j, const std::string& out) { emit(j.dump(2) + "\n", out); }

// Options shared by subcommands that touch the pipeline config.
struct ConfigFlags {
  std::string path;
  std::optional<std::uint64_t> seed;
  std::optional<double> lambda_f;
  std::optional<std::string> k_rule;
  std::optional<std::size_t> restarts;
  std::optional<std::size_t> max_iter;
  std::optional<double> tol;
  bool pool_pixel_stream = false;

  void attach(CLI::App* app, bool pipeline_flags) {
    app->add_option("--config", path, "JSON config file");
    app->add_option("--seed", seed, "base seed (default: ADATA_SEED or 0)");
    app->add_option("--lambda-f", lambda_f, "feature weight in the clustering cost");
    app->add_option("--restarts", restarts, "clustering restarts");
    app->add_option("--max-iter", max_iter, "Lloyd iteration cap");
    app->add_option("--tol", tol, "objective change tolerance");
    if (pipeline_flags) {
      app->add_option("--k-rule", k_rule, "half_beta or fixed:<k>");
      app->add_flag("--pool-pixel-stream", pool_pixel_stream, "feed pooled pixel tokens into F_mix");
    }
  }

  PipelineConfig resolve() const {
    PipelineConfig base;
    base.seed = env_seed();
    PipelineConfig c = path.empty() ? base : config_from_json(read_json(path), base);
    if (seed) c.seed = *seed;
    if (lambda_f) c.lambda_f = *lambda_f;
    if (k_rule) c.k_rule = KRule::parse(*k_rule);
    if (restarts) c.restarts = *restarts;
    if (max_iter) c.max_iter = *max_iter;
    if (tol) c.tol = *tol;
    if (pool_pixel_stream) c.pool_pixel_stream = true;
    c.validate();
    return c;
  }
};

// Question input: free text, raw ids, or an external embedding tensor.
struct TextFlags {
  std::string question;
  std::vector<TokenId> ids;
  std::string embedding;

  void attach(CLI::App* app) {
    auto* q = app->add_option("--question", question, "question text (builtin vocabulary)");
    auto* i = app->add_option("--ids", ids, "question token ids")->delimiter(',');
    auto* e = app->add_option("--embedding", embedding, "external text embedding tensor [l, D_t]");
    q->excludes(i)->excludes(e);
    i->excludes(e);
  }

  std::pair<TextEmbedding, std::vector<TokenId>> load(std::size_t dim, std::uint64_t encoder_seed) const {
    if (!embedding.empty()) return {embedding_from(read_tensor(embedding)), {}};
    std::vector<TokenId> tokens = ids.empty() ? Vocabulary::builtin().tokenize(question) : ids;
    return {encode_text_surrogate(tokens, dim, encoder_seed), tokens};
  }
};

std::optional<std::size_t> parse_profile(const std::string& text, std::size_t count) {
  if (text.empty()) return std::nullopt;
  static const std::vector<std::string> names = {"coarse", "medium", "fine"};
  for (std::size_t i = 0; i < names.size() && i < count; ++i) {
    if (text == names[i]) return i;
  }
  try {
    std::size_t used = 0;
    const auto idx = std::stoul(text, &used);
    if (used == text.size() && idx < count) return idx;
  } catch (const std::exception&) {
  }
  throw Error("cli", ErrorCode::BadConfig, "unknown profile '" + text + "'");
}

ControllerModel load_or_train_controller(const std::string& path, const PipelineConfig& config) {
  if (!path.empty()) return controller_from_json(read_json(path));
  std::cerr << "adata: no --controller given; training the default controller\n";
  return train_default_controller(config);
}

Json clustering_json(const Clustering& c) {
  Json centroids = Json::array();
  for (const auto& ct : c.centroids) {
    centroids.push_back({{"attention", ct.a_center}, {"feature", ct.f_center}, {"members", ct.members}});
  }
  return {{"format", "adata.clustering/1"},
          {"seed", c.seed},
          {"lambda_f", c.lambda_f},
          {"iterations", c.iterations},
          {"final_objective", c.final_objective},
          {"objective_trace", c.objective_trace},
          {"assignments", c.assignments},
          {"centroids", centroids}};
}

std::vector<std::size_t> parse_betas(const std::vector<std::string>& items) {
  std::vector<std::size_t> out;
  for (const auto& b : items) {
    if (b == "all") {
      out.push_back(kBetaAll);
      continue;
    }
    try {
      std::size_t used = 0;
      const auto v = std::stoul(b, &used);
      if (used == b.size() && v >= 1) {
        out.push_back(v);
        continue;
      }
    } catch (const std::exception&) {
    }
    throw Error("cli", ErrorCode::BadConfig, "beta must be a positive integer or 'all', got '" + b + "'");
  }
  return out;
}

std::string summarize_report(const Json& r) {
  std::ostringstream out;
  const auto& sel = r.at("selected_profile");
  out << "profile: alpha=" << sel.at("alpha") << " beta=" << sel.at("beta") << " gamma=" << sel.at("gamma");
  if (!sel.at("index").is_null()) out << " (index " << sel.at("index") << ")";
  if (sel.value("forced", false)) out << " [forced]";
  out << '\n';
  if (!r.at("distribution").is_null()) {
    out << "distribution:";
    for (const auto& p : r.at("distribution").at("probs")) out << ' ' << format_double(p.get<double>());
    out << '\n';
  }
  const auto& pool = r.at("pooling");
  out << "pooling: " << pool.at("side_in") << "x" << pool.at("side_in") << " -> " << pool.at("side_out") << "x"
      << pool.at("side_out") << '\n';
  const auto& cl = r.at("clustering");
  out << "clustering: " << cl.at("num_clusters") << " clusters over " << cl.at("num_tokens") << " tokens, "
      << cl.at("iterations") << " iterations, objective " << format_double(cl.at("final_objective").get<double>())
      << '\n';
  const auto& s = r.at("selection");
  out << "selection: k=" << s.at("k") << " (" << s.at("k_rule").get<std::string>() << ")\n";
  const auto& b = r.at("token_budget");
  out << "tokens: pixel=" << b.at("n_pixel") << " semantic=" << b.at("n_semantic") << " text=" << b.at("n_text")
      << " total=" << b.at("total") << " overhead=" << format_double(b.at("overhead_ratio").get<double>()) << '\n';
  return out.str();
}

int run(int argc, char** argv) {
  CLI::App app{"adata: adaptive-granularity token pipeline"};
  app.require_subcommand(1);
  std::string simd;
  app.add_option("--simd", simd, "force kernel backend: scalar, avx2, neon");

  // gen-scene
  auto* gen = app.add_subcommand("gen-scene", "write a planted synthetic scene");
  SceneOptions scene_opts;
  std::optional<std::uint64_t> gen_seed;
  std::string gen_dir = ".";
  gen->add_option("--groups", scene_opts.groups, "planted blobs G");
  gen->add_option("--side", scene_opts.side, "grid side");
  gen->add_option("--channels", scene_opts.channels, "feature channels C");
  gen->add_option("--separation", scene_opts.separation, "signature separation / intra spread");
  gen->add_option("--class-label", scene_opts.class_label, "scene class");
  gen->add_option("--seed", gen_seed, "scene seed (default: ADATA_SEED or 0)");
  gen->add_option("--out-dir", gen_dir, "directory for features.adt, saliency.adt, scene.json");

  // pool
  auto* pool = app.add_subcommand("pool", "pool features and saliency by alpha");
  std::string pool_features_in, pool_saliency_in, pool_features_out, pool_saliency_out;
  std::size_t pool_alpha = 1;
  pool->add_option("--features", pool_features_in, "feature tensor")->required();
  pool->add_option("--saliency", pool_saliency_in, "saliency tensor");
  pool->add_option("--alpha", pool_alpha, "pooling factor")->required();
  pool->add_option("--out", pool_features_out, "pooled feature tensor")->required();
  pool->add_option("--out-saliency", pool_saliency_out, "pooled saliency tensor");

  // cluster
  auto* clus = app.add_subcommand("cluster", "relation-aware clustering of a grid");
  ConfigFlags clus_cfg;
  clus_cfg.attach(clus, false);
  std::string clus_features, clus_saliency, clus_out;
  std::size_t clus_m = 3;
  clus->add_option("--features", clus_features, "feature tensor")->required();
  clus->add_option("--saliency", clus_saliency, "saliency tensor")->required();
  clus->add_option("--clusters,-M", clus_m, "cluster count");
  clus->add_option("--out", clus_out, "clustering JSON");

  // aggregate
  auto* agg = app.add_subcommand("aggregate", "text descriptor h for a question");
  ConfigFlags agg_cfg;
  agg_cfg.attach(agg, false);
  TextFlags agg_text;
  agg_text.attach(agg);
  std::string agg_controller, agg_out;
  agg->add_option("--controller", agg_controller, "controller JSON");
  agg->add_option("--out", agg_out, "descriptor JSON");

  // controller-train
  auto* ctrain = app.add_subcommand("controller-train", "train the granularity controller");
  ConfigFlags ctrain_cfg;
  ctrain_cfg.attach(ctrain, false);
  std::string ctrain_corpus, ctrain_out, ctrain_trace, ctrain_write_corpus;
  std::optional<std::size_t> ctrain_epochs, ctrain_items;
  std::optional<double> ctrain_lr;
  ctrain->add_option("--corpus", ctrain_corpus, "corpus file (default: synthetic)");
  ctrain->add_option("--epochs", ctrain_epochs, "gradient steps");
  ctrain->add_option("--lr", ctrain_lr, "learning rate");
  ctrain->add_option("--items-per-class", ctrain_items, "synthetic corpus size per class");
  ctrain->add_option("--write-corpus", ctrain_write_corpus, "also write the training corpus");
  ctrain->add_option("--trace", ctrain_trace, "loss trace CSV");
  ctrain->add_option("--out", ctrain_out, "controller JSON");

  // controller-predict
  auto* cpred = app.add_subcommand("controller-predict", "granularity distribution for a question");
  ConfigFlags cpred_cfg;
  cpred_cfg.attach(cpred, false);
  TextFlags cpred_text;
  cpred_text.attach(cpred);
  std::string cpred_controller, cpred_out;
  cpred->add_option("--controller", cpred_controller, "controller JSON");
  cpred->add_option("--out", cpred_out, "prediction JSON");

  // pipeline
  auto* pipe = app.add_subcommand("pipeline", "run the full workflow on one image");
  ConfigFlags pipe_cfg;
  pipe_cfg.attach(pipe, true);
  TextFlags pipe_text;
  pipe_text.attach(pipe);
  std::string pipe_features, pipe_saliency, pipe_controller, pipe_profile, pipe_out, pipe_mix;
  bool pipe_timings = false;
  pipe->add_option("--features", pipe_features, "feature tensor")->required();
  pipe->add_option("--saliency", pipe_saliency, "saliency tensor")->required();
  pipe->add_option("--controller", pipe_controller, "controller JSON (default: train one)");
  pipe->add_option("--profile", pipe_profile, "force a profile: index or coarse/medium/fine");
  pipe->add_flag("--timings", pipe_timings, "include wall-clock stage timings in the report");
  pipe->add_option("--out", pipe_out, "report JSON");
  pipe->add_option("--mix-out", pipe_mix, "F_mix token tensor");

  // sweep
  auto* swp = app.add_subcommand("sweep", "(alpha, beta) ablation on planted scenes");
  ConfigFlags swp_cfg;
  swp_cfg.attach(swp, true);
  SweepOptions sweep_opts;
  std::vector<std::string> sweep_betas = {"3", "12", "all"};
  std::optional<std::uint64_t> sweep_scene_seed;
  std::string swp_out;
  swp->add_option("--alphas", sweep_opts.alphas, "pooling factors")->delimiter(',');
  swp->add_option("--betas", sweep_betas, "cluster counts or 'all'")->delimiter(',');
  swp->add_option("--scenes", sweep_opts.scenes, "planted scenes per cell");
  swp->add_option("--groups", sweep_opts.scene.groups, "planted blobs per scene");
  swp->add_option("--side", sweep_opts.scene.side, "grid side");
  swp->add_option("--channels", sweep_opts.scene.channels, "feature channels");
  swp->add_option("--separation", sweep_opts.scene.separation, "signature separation");
  swp->add_option("--scene-seed", sweep_scene_seed, "base scene seed (default: config seed)");
  swp->add_option("--jobs,-j", sweep_opts.jobs, "concurrent cells");
  swp->add_flag("--timings", sweep_opts.timings, "add a runtime_ms column");
  swp->add_option("--out", swp_out, "CSV output");

  // train
  auto* trn = app.add_subcommand("train", "train confidence heads and classifier on planted scenes");
  ConfigFlags trn_cfg;
  trn_cfg.attach(trn, true);
  HeadHyper head_hyper;
  std::size_t trn_scenes = 8;
  std::string trn_controller, trn_profile = "medium", trn_out, trn_trace;
  std::string trn_question = "what is in this image";
  trn->add_option("--scenes", trn_scenes, "scenes, alternating between two classes");
  trn->add_option("--steps", head_hyper.steps, "gradient steps");
  trn->add_option("--lr", head_hyper.lr, "learning rate");
  trn->add_flag("--train-projector", head_hyper.train_projector, "also update the projector bank");
  trn->add_option("--controller", trn_controller, "controller JSON (default: untrained init)");
  trn->add_option("--profile", trn_profile, "profile used to build samples");
  trn->add_option("--question", trn_question, "question paired with every scene");
  trn->add_option("--out", trn_out, "trained heads JSON");
  trn->add_option("--trace", trn_trace, "loss trace CSV");

  // report
  auto* rep = app.add_subcommand("report", "summarize a pipeline report");
  std::string rep_in, rep_out;
  rep->add_option("--in", rep_in, "pipeline report JSON")->required();
  rep->add_option("--out", rep_out, "summary text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  if (!simd.empty()) {
    if (simd == "scalar") kernels::set_backend(kernels::Backend::Scalar);
    else if (simd == "avx2") kernels::set_backend(kernels::Backend::Avx2);
    else if (simd == "neon") kernels::set_backend(kernels::Backend::Neon);
    else throw Error("cli", ErrorCode::BadConfig, "unknown --simd backend '" + simd + "'");
  }

  if (gen->parsed()) {
    scene_opts.seed = gen_seed ? *gen_seed : env_seed();
    const SyntheticScene s = generate_scene(scene_opts);
    const std::filesystem::path dir = gen_dir;
    std::filesystem::create_directories(dir);
    write_tensor(to_container(s.features, "scene.features", scene_opts.seed), dir / "features.adt");
    write_tensor(to_container(s.saliency, "scene.saliency", scene_opts.seed), dir / "saliency.adt");
    Json meta = {{"format", "adata.scene/1"},
                 {"seed", scene_opts.seed},
                 {"groups", scene_opts.groups},
                 {"side", scene_opts.side},
                 {"channels", scene_opts.channels},
                 {"separation", scene_opts.separation},
                 {"class_label", s.class_label},
                 {"centers", s.centers},
                 {"labels", s.labels}};
    write_json(meta, dir / "scene.json");
    return 0;
  }

  if (pool->parsed()) {
    const auto in = read_tensor(pool_features_in);
    const FeatureMap f = features_from(in);
    const PoolKernel k = build_kernel(f.side(), pool_alpha);
    write_tensor(to_container(pool_features(f, k), in.name + ".pooled", in.seed), pool_features_out);
    if (!pool_saliency_in.empty()) {
      if (pool_saliency_out.empty()) throw Error("cli", ErrorCode::BadConfig, "--saliency needs --out-saliency");
      const auto sin = read_tensor(pool_saliency_in);
      write_tensor(to_container(pool_saliency(saliency_from(sin), k), sin.name + ".pooled", sin.seed),
                   pool_saliency_out);
    }
    return 0;
  }

  if (clus->parsed()) {
    const PipelineConfig c = clus_cfg.resolve();
    const FeatureMap f = features_from(read_tensor(clus_features));
    const SaliencyMap s = saliency_from(read_tensor(clus_saliency));
    emit(clustering_json(cluster(f, s, clus_m, cluster_seed(c), c.cluster_options())), clus_out);
    return 0;
  }

  if (agg->parsed()) {
    const PipelineConfig c = agg_cfg.resolve();
    const ControllerModel m = load_or_train_controller(agg_controller, c);
    const auto [text, ids] = agg_text.load(m.params.text_dim(), m.encoder_seed);
    emit(Json{{"format", "adata.descriptor/1"}, {"question_ids", ids}, {"descriptor", aggregate(text, m.params)}},
         agg_out);
    return 0;
  }

  if (ctrain->parsed()) {
    PipelineConfig c = ctrain_cfg.resolve();
    if (ctrain_epochs) c.controller.epochs = *ctrain_epochs;
    if (ctrain_lr) c.controller.lr = *ctrain_lr;
    if (ctrain_items) c.controller.items_per_class = *ctrain_items;
    c.validate();
    const GranularityCorpus corpus =
        ctrain_corpus.empty()
            ? make_synthetic_corpus(c.profiles.size(), c.controller.items_per_class, c.controller.corpus_seed)
            : read_corpus(ctrain_corpus);
    if (!ctrain_write_corpus.empty()) write_corpus(corpus, ctrain_write_corpus);
    ControllerHyper hyper{c.controller.lr, c.controller.epochs, c.encoder_seed};
    const auto result = train_controller(corpus, init_controller(c.controller_dims, c.profiles, c.controller.init_seed), hyper);
    if (!ctrain_trace.empty()) {
      std::ostringstream csv;
      csv << "epoch,loss\n";
      for (std::size_t e = 0; e < result.loss_trace.size(); ++e) csv << e << ',' << format_double(result.loss_trace[e]) << '\n';
      write_text(csv.str(), ctrain_trace);
    }
    emit(to_json(ControllerModel{result.params, c.encoder_seed}), ctrain_out);
    return 0;
  }

  if (cpred->parsed()) {
    const PipelineConfig c = cpred_cfg.resolve();
    const ControllerModel m = load_or_train_controller(cpred_controller, c);
    const auto [text, ids] = cpred_text.load(m.params.text_dim(), m.encoder_seed);
    const auto h = aggregate(text, m.params);
    const auto dist = predict(h, m.params);
    const auto e = expected_profile(dist);
    Json j = {{"format", "adata.prediction/1"},
              {"question_ids", ids},
              {"probs", dist.probs},
              {"selected_index", argmax_index(dist.probs)},
              {"selected_profile", to_json(select_profile(dist))},
              {"expected_profile", {{"alpha", e[0]}, {"beta", e[1]}, {"gamma", e[2]}}}};
    emit(j, cpred_out);
    return 0;
  }

  if (pipe->parsed()) {
    const PipelineConfig c = pipe_cfg.resolve();
    PipelineOptions opts;
    opts.profile_override = parse_profile(pipe_profile, c.profiles.size());
    opts.timings = pipe_timings;
    FeatureMap features = features_from(read_tensor(pipe_features));
    SaliencyMap saliency = saliency_from(read_tensor(pipe_saliency));
    const ControllerModel m = load_or_train_controller(pipe_controller, c);
    auto [text, ids] = pipe_text.load(c.model_dim, m.encoder_seed);
    PipelineInputs in{std::move(features), std::move(saliency), std::move(text), std::move(ids)};
    const PipelineResult r = run_pipeline(c, &m, in, opts);
    if (!pipe_mix.empty()) write_tensor(to_container(r.mix, "F_mix", c.seed), pipe_mix);
    emit(r.report, pipe_out);
    return 0;
  }

  if (swp->parsed()) {
    const PipelineConfig c = swp_cfg.resolve();
    sweep_opts.betas = parse_betas(sweep_betas);
    sweep_opts.scene.seed = sweep_scene_seed ? *sweep_scene_seed : c.seed;
    emit(sweep_csv(run_sweep(c, sweep_opts), sweep_opts.timings), swp_out);
    return 0;
  }

  if (trn->parsed()) {
    const PipelineConfig c = trn_cfg.resolve();
    const ControllerModel m = trn_controller.empty()
                                  ? ControllerModel{init_controller(c.controller_dims, c.profiles, c.controller.init_seed),
                                                    c.encoder_seed}
                                  : controller_from_json(read_json(trn_controller));
    const auto samples =
        planted_head_samples(c, m, trn_question, trn_scenes, parse_profile(trn_profile, c.profiles.size()).value_or(1));
    const HeadModel init = init_head_model(2, config_projector(c));
    const HeadTrainResult result = train_heads(samples, init, c.loss, head_hyper);
    if (!trn_trace.empty()) {
      std::ostringstream csv;
      csv << "step,task,pixel,sema,total\n";
      for (std::size_t i = 0; i < result.trace.size(); ++i) {
        const auto& b = result.trace[i];
        csv << i << ',' << format_double(b.task) << ',' << format_double(b.pixel) << ',' << format_double(b.sema)
            << ',' << format_double(b.total) << '\n';
      }
      write_text(csv.str(), trn_trace);
    }
    Json j = to_json(result.model);
    j["initial_loss"] = result.trace.front().total;
    j["final_loss"] = result.trace.back().total;
    emit(j, trn_out);
    return 0;
  }

  if (rep->parsed()) {
    emit(summarize_report(read_json(rep_in)), rep_out);
    return 0;
  }
  return kExitInput;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const adata::Error& e) {
    std::cerr << "adata: " << e.what() << '\n';
    return static_cast<int>(e.category());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "adata: harness.BadFormat: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "adata: harness.IoFailure: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "adata: " << e.what() << '\n';
    return kExitConfig;
  }
}
