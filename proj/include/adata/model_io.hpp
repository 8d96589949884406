// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"

#include "adata/controller.hpp"
#include "adata/objective.hpp"

namespace adata {

using Json = nlohmann::ordered_json;

Json to_json(const GranularityProfile& profile);
GranularityProfile profile_from_json(const Json& j);

Json to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

/// A trained controller plus the surrogate encoder seed it was trained with.
struct ControllerModel {
  ControllerParams params;
  std::uint64_t encoder_seed = 7;
};

Json to_json(const ControllerModel& model);
/// Throws BadFormat on missing keys or bad shapes.
ControllerModel controller_from_json(const Json& j);

Json to_json(const HeadModel& model);
HeadModel head_model_from_json(const Json& j);

/// Parses a JSON file. Throws IoFailure / BadFormat.
Json read_json(const std::filesystem::path& path);
/// Writes `j` with two-space indent and a trailing newline. Throws IoFailure.
void write_json(const Json& j, const std::filesystem::path& path);
/// Writes text verbatim. Throws IoFailure.
void write_text(const std::string& text, const std::filesystem::path& path);

}  // namespace adata
