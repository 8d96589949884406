// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0

#include "adata/model_io.hpp"

#include <fstream>

#include "adata/error.hpp"

namespace adata {

namespace {

constexpr const char* kModule = "harness";

template <typename F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw Error(kModule, ErrorCode::BadFormat, std::string(what) + ": " + e.what());
  }
}

ConfidenceHead head_from_json(const Json& j) {
  return {j.at("w").get<std::vector<double>>(), j.at("b").get<double>()};
}

Json to_json(const ConfidenceHead& h) {
  Json j;
  j["w"] = h.w;
  j["b"] = h.b;
  return j;
}

}  // namespace

Json to_json(const GranularityProfile& p) {
  Json j;
  j["alpha"] = p.alpha;
  j["beta"] = p.beta;
  j["gamma"] = p.gamma;
  return j;
}

GranularityProfile profile_from_json(const Json& j) {
  return guarded("profile", [&] {
    return GranularityProfile{j.at("alpha").get<std::size_t>(), j.at("beta").get<std::size_t>(),
                              j.at("gamma").get<std::size_t>()};
  });
}

Json to_json(const Matrix& m) {
  Json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  j["data"] = m.data();
  return j;
}

Matrix matrix_from_json(const Json& j) {
  return guarded("matrix", [&] {
    const auto rows = j.at("rows").get<std::size_t>();
    const auto cols = j.at("cols").get<std::size_t>();
    auto data = j.at("data").get<std::vector<double>>();
    if (data.size() != rows * cols) throw Error(kModule, ErrorCode::BadFormat, "matrix data length mismatch");
    return Matrix(rows, cols, std::move(data));
  });
}

Json to_json(const ControllerModel& model) {
  const auto& p = model.params;
  Json j;
  j["format"] = "adata.controller/1";
  j["encoder_seed"] = model.encoder_seed;
  Json profiles = Json::array();
  for (const auto& g : p.profiles) profiles.push_back(to_json(g));
  j["profiles"] = profiles;
  j["W_p"] = to_json(p.W_p);
  j["W1"] = to_json(p.W1);
  j["b1"] = p.b1;
  j["W2"] = to_json(p.W2);
  j["b2"] = p.b2;
  return j;
}

ControllerModel controller_from_json(const Json& j) {
  return guarded("controller", [&] {
    ControllerModel m;
    m.encoder_seed = j.at("encoder_seed").get<std::uint64_t>();
    for (const auto& g : j.at("profiles")) m.params.profiles.push_back(profile_from_json(g));
    m.params.W_p = matrix_from_json(j.at("W_p"));
    m.params.W1 = matrix_from_json(j.at("W1"));
    m.params.b1 = j.at("b1").get<std::vector<double>>();
    m.params.W2 = matrix_from_json(j.at("W2"));
    m.params.b2 = j.at("b2").get<std::vector<double>>();
    m.params.validate();
    return m;
  });
}

Json to_json(const HeadModel& model) {
  Json j;
  j["format"] = "adata.heads/1";
  j["pixel_head"] = to_json(model.pixel_head);
  j["semantic_head"] = to_json(model.semantic_head);
  j["classifier"] = {{"weight", to_json(model.classifier.weight)}, {"bias", model.classifier.bias}};
  Json maps = Json::array();
  for (const auto& m : model.projector.maps) maps.push_back({{"weight", to_json(m.weight)}, {"bias", m.bias}});
  j["projector"] = maps;
  return j;
}

HeadModel head_model_from_json(const Json& j) {
  return guarded("heads", [&] {
    HeadModel m;
    m.pixel_head = head_from_json(j.at("pixel_head"));
    m.semantic_head = head_from_json(j.at("semantic_head"));
    m.classifier.weight = matrix_from_json(j.at("classifier").at("weight"));
    m.classifier.bias = j.at("classifier").at("bias").get<std::vector<double>>();
    for (const auto& map : j.at("projector")) {
      m.projector.maps.push_back({matrix_from_json(map.at("weight")), map.at("bias").get<std::vector<double>>()});
    }
    m.projector.validate();
    return m;
  });
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(kModule, ErrorCode::IoFailure, "cannot open " + path.string());
  return guarded("json", [&] { return Json::parse(in); });
}

void write_json(const Json& j, const std::filesystem::path& path) { write_text(j.dump(2) + "\n", path); }

void write_text(const std::string& text, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error(kModule, ErrorCode::IoFailure, "cannot write " + path.string());
}

}  // namespace adata
