// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0
//
// Binary tensor container:
//
//   offset 0   8 bytes  magic "ADATA\0\0\1"
//   offset 8   u32 LE   dtype (0 = f32 LE)
//   offset 12  u32 LE   rank
//   offset 16  rank x u32 LE dims
//   then       4 * prod(dims) bytes of row-major f32 LE payload
//
// Metadata lives in a JSON sidecar at "<path>.json":
//   {"name": ..., "role": "features|saliency|text_embedding|tokens", "seed": ...}

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "adata/controller.hpp"
#include "adata/tensors.hpp"

namespace adata {

enum class TensorRole { Features, Saliency, TextEmbedding, Tokens };

std::string_view to_string(TensorRole role);
/// Throws BadFormat for an unknown role name.
TensorRole parse_tensor_role(std::string_view name);

struct TensorContainer {
  std::uint32_t dtype = 0;
  std::vector<std::uint32_t> dims;
  std::vector<float> values;
  std::string name;
  TensorRole role = TensorRole::Features;
  std::uint64_t seed = 0;

  std::size_t element_count() const;

  friend bool operator==(const TensorContainer&, const TensorContainer&) = default;
};

inline constexpr char kTensorMagic[8] = {'A', 'D', 'A', 'T', 'A', '\0', '\0', '\1'};

/// Container bytes without the sidecar. Throws DimensionMismatch when the
/// payload length disagrees with dims, UnknownDtype for dtype != 0.
std::vector<std::uint8_t> encode_tensor(const TensorContainer& container);
/// Parses container bytes; metadata fields keep their defaults. Throws
/// BadMagic, UnknownDtype, TruncatedPayload, BadFormat (trailing bytes).
TensorContainer decode_tensor(const std::vector<std::uint8_t>& bytes);

/// Writes `path` and `path.json`. Throws IoFailure.
void write_tensor(const TensorContainer& container, const std::filesystem::path& path);
/// Reads `path` and, when present, its sidecar. Throws IoFailure plus the
/// decode errors.
TensorContainer read_tensor(const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& path);

// Conversions between containers and pipeline types. Values pass through f32.
TensorContainer to_container(const FeatureMap& features, std::string name, std::uint64_t seed);
TensorContainer to_container(const SaliencyMap& saliency, std::string name, std::uint64_t seed);
TensorContainer to_container(const TokenSequence& sequence, std::string name, std::uint64_t seed);
TensorContainer to_container(const TextEmbedding& embedding, std::string name, std::uint64_t seed);

/// Rank-3 [side, side, C]. Throws BadFormat for other shapes.
FeatureMap features_from(const TensorContainer& container);
/// Rank-2 [side, side], normalized on load. Throws BadFormat, AllZeroSaliency.
SaliencyMap saliency_from(const TensorContainer& container);
/// Rank-2 [l, D_t]. Throws BadFormat.
TextEmbedding embedding_from(const TensorContainer& container);

}  // namespace adata
