// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0

#include "adata/config.hpp"

#include <charconv>
#include <cmath>
#include <set>

#include "adata/error.hpp"

namespace adata {

namespace {

constexpr const char* kModule = "harness";

[[noreturn]] void bad(const std::string& why) { throw Error(kModule, ErrorCode::BadConfig, why); }

}  // namespace

std::size_t KRule::resolve(std::size_t beta, std::size_t clusters) const {
  return fixed ? std::min(k, clusters) : half_beta_k(beta, clusters);
}

std::string KRule::to_string() const { return fixed ? "fixed:" + std::to_string(k) : "half_beta"; }

KRule KRule::parse(const std::string& text) {
  if (text == "half_beta") return {};
  const std::string prefix = "fixed:";
  if (text.rfind(prefix, 0) == 0) {
    KRule r{true, 0};
    const char* first = text.data() + prefix.size();
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, r.k);
    if (ec == std::errc{} && ptr == last && first != last && r.k >= 1) return r;
  }
  bad("k_rule must be 'half_beta' or 'fixed:<k>' with k >= 1, got '" + text + "'");
}

void PipelineConfig::validate() const {
  if (grid_side == 0) bad("grid_side must be positive");
  if (profiles.size() < 2) bad("need at least two profiles");
  for (const auto& p : profiles) {
    if (p.alpha == 0 || p.beta == 0) bad("profile alpha and beta must be >= 1");
    if (p.gamma >= profiles.size()) bad("profile gamma must index the projector bank");
    if (grid_side % p.alpha != 0) {
      throw Error(kModule, ErrorCode::NonDivisible,
                  "alpha " + std::to_string(p.alpha) + " does not divide grid side " + std::to_string(grid_side));
    }
  }
  if (!(lambda_f >= 0.0) || !(saliency_weight >= 0.0)) bad("lambda_f and saliency_weight must be >= 0");
  if (!(eta.eta1 >= 0.0) || !(eta.eta2 >= 0.0) || !(eta.eta3 >= 0.0)) bad("eta weights must be >= 0");
  if (!(loss.lambda >= 0.0) || !(loss.lambda_d >= 0.0) || !(loss.lambda_t >= 0.0)) bad("lambdas must be >= 0");
  if (controller_dims.text_dim == 0 || controller_dims.descriptor_dim == 0 || controller_dims.hidden_dim == 0 ||
      channels == 0 || model_dim == 0) {
    bad("dims must be positive");
  }
  // Text tokens join F_mix unprojected, so they must already live in D.
  if (model_dim != controller_dims.text_dim) bad("dims.model_dim must equal dims.text_dim");
  if (max_iter == 0 || restarts == 0) bad("max_iter and restarts must be >= 1");
  if (!(tol >= 0.0)) bad("tol must be >= 0");
  if (!(controller.lr >= 0.0) || controller.items_per_class == 0) bad("controller lr >= 0 and items_per_class >= 1");
}

ClusterOptions PipelineConfig::cluster_options() const {
  ClusterOptions o;
  o.lambda_f = lambda_f;
  o.saliency_weight = saliency_weight;
  o.max_iter = max_iter;
  o.tol = tol;
  o.restarts = restarts;
  return o;
}

Json to_json(const PipelineConfig& c) {
  Json j;
  j["grid_side"] = c.grid_side;
  Json profiles = Json::array();
  for (const auto& p : c.profiles) profiles.push_back(to_json(p));
  j["profiles"] = profiles;
  j["lambda_f"] = c.lambda_f;
  j["saliency_weight"] = c.saliency_weight;
  j["eta"] = {c.eta.eta1, c.eta.eta2, c.eta.eta3};
  j["k_rule"] = c.k_rule.to_string();
  j["lambda"] = c.loss.lambda;
  j["lambda_d"] = c.loss.lambda_d;
  j["lambda_t"] = c.loss.lambda_t;
  j["dims"] = {{"text_dim", c.controller_dims.text_dim},
               {"descriptor_dim", c.controller_dims.descriptor_dim},
               {"hidden_dim", c.controller_dims.hidden_dim},
               {"channels", c.channels},
               {"model_dim", c.model_dim}};
  j["seed"] = c.seed;
  j["encoder_seed"] = c.encoder_seed;
  j["max_iter"] = c.max_iter;
  j["tol"] = c.tol;
  j["restarts"] = c.restarts;
  j["pool_pixel_stream"] = c.pool_pixel_stream;
  j["controller"] = {{"lr", c.controller.lr},
                     {"epochs", c.controller.epochs},
                     {"items_per_class", c.controller.items_per_class},
                     {"corpus_seed", c.controller.corpus_seed},
                     {"init_seed", c.controller.init_seed}};
  return j;
}

PipelineConfig config_from_json(const Json& j, const PipelineConfig& base) {
  if (!j.is_object()) bad("config must be a JSON object");
  static const std::set<std::string> known = {
      "grid_side", "profiles", "lambda_f", "saliency_weight", "eta",      "k_rule",  "lambda",
      "lambda_d",  "lambda_t", "dims",     "seed",            "encoder_seed", "max_iter", "tol",
      "restarts",  "pool_pixel_stream", "controller"};
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) bad("unknown config key '" + key + "'");
  }
  PipelineConfig c = base;
  try {
    auto read = [&j](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    read("grid_side", c.grid_side);
    if (j.contains("profiles")) {
      c.profiles.clear();
      for (const auto& p : j.at("profiles")) c.profiles.push_back(profile_from_json(p));
    }
    read("lambda_f", c.lambda_f);
    read("saliency_weight", c.saliency_weight);
    if (j.contains("eta")) {
      const auto eta = j.at("eta").get<std::vector<double>>();
      if (eta.size() != 3) bad("eta must have three entries");
      c.eta = {eta[0], eta[1], eta[2]};
    }
    if (j.contains("k_rule")) c.k_rule = KRule::parse(j.at("k_rule").get<std::string>());
    read("lambda", c.loss.lambda);
    read("lambda_d", c.loss.lambda_d);
    read("lambda_t", c.loss.lambda_t);
    if (j.contains("dims")) {
      const auto& d = j.at("dims");
      for (const auto& [key, _] : d.items()) {
        if (key != "text_dim" && key != "descriptor_dim" && key != "hidden_dim" && key != "channels" &&
            key != "model_dim") {
          bad("unknown dims key '" + key + "'");
        }
      }
      if (d.contains("text_dim")) c.controller_dims.text_dim = d.at("text_dim").get<std::size_t>();
      if (d.contains("descriptor_dim")) c.controller_dims.descriptor_dim = d.at("descriptor_dim").get<std::size_t>();
      if (d.contains("hidden_dim")) c.controller_dims.hidden_dim = d.at("hidden_dim").get<std::size_t>();
      if (d.contains("channels")) c.channels = d.at("channels").get<std::size_t>();
      if (d.contains("model_dim")) c.model_dim = d.at("model_dim").get<std::size_t>();
    }
    read("seed", c.seed);
    read("encoder_seed", c.encoder_seed);
    read("max_iter", c.max_iter);
    read("tol", c.tol);
    read("restarts", c.restarts);
    read("pool_pixel_stream", c.pool_pixel_stream);
    if (j.contains("controller")) {
      const auto& t = j.at("controller");
      for (const auto& [key, _] : t.items()) {
        if (key != "lr" && key != "epochs" && key != "items_per_class" && key != "corpus_seed" && key != "init_seed") {
          bad("unknown controller key '" + key + "'");
        }
      }
      if (t.contains("lr")) c.controller.lr = t.at("lr").get<double>();
      if (t.contains("epochs")) c.controller.epochs = t.at("epochs").get<std::size_t>();
      if (t.contains("items_per_class")) c.controller.items_per_class = t.at("items_per_class").get<std::size_t>();
      if (t.contains("corpus_seed")) c.controller.corpus_seed = t.at("corpus_seed").get<std::uint64_t>();
      if (t.contains("init_seed")) c.controller.init_seed = t.at("init_seed").get<std::uint64_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("config value has wrong type: ") + e.what());
  }
  c.validate();
  return c;
}

PipelineConfig read_config(const std::filesystem::path& path) { return config_from_json(read_json(path)); }

}  // namespace adata
