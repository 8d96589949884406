// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0

#include "adata/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <numeric>

#include "json.hpp"

#include "adata/error.hpp"

namespace adata {

namespace {

constexpr const char* kModule = "harness";
constexpr std::size_t kHeaderFixed = 16;

static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

std::vector<std::uint32_t> to_dims(std::initializer_list<std::size_t> dims) {
  std::vector<std::uint32_t> out;
  for (std::size_t d : dims) {
    if (d > UINT32_MAX) throw Error(kModule, ErrorCode::InvalidArgument, "dimension exceeds u32");
    out.push_back(static_cast<std::uint32_t>(d));
  }
  return out;
}

}  // namespace

std::string_view to_string(TensorRole role) {
  switch (role) {
    case TensorRole::Features: return "features";
    case TensorRole::Saliency: return "saliency";
    case TensorRole::TextEmbedding: return "text_embedding";
    case TensorRole::Tokens: return "tokens";
  }
  return "unknown";
}

TensorRole parse_tensor_role(std::string_view name) {
  for (TensorRole r : {TensorRole::Features, TensorRole::Saliency, TensorRole::TextEmbedding, TensorRole::Tokens}) {
    if (to_string(r) == name) return r;
  }
  throw Error(kModule, ErrorCode::BadFormat, "unknown tensor role '" + std::string(name) + "'");
}

std::size_t TensorContainer::element_count() const {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                         [](std::size_t acc, std::uint32_t d) { return acc * d; });
}

std::vector<std::uint8_t> encode_tensor(const TensorContainer& c) {
  if (c.dtype != 0) throw Error(kModule, ErrorCode::UnknownDtype, "dtype " + std::to_string(c.dtype));
  if (c.values.size() != c.element_count()) {
    throw Error(kModule, ErrorCode::DimensionMismatch,
                "payload has " + std::to_string(c.values.size()) + " values, dims imply " +
                    std::to_string(c.element_count()));
  }
  std::vector<std::uint8_t> out(std::begin(kTensorMagic), std::end(kTensorMagic));
  put_u32(out, c.dtype);
  put_u32(out, static_cast<std::uint32_t>(c.dims.size()));
  for (std::uint32_t d : c.dims) put_u32(out, d);
  out.reserve(out.size() + 4 * c.values.size());
  for (float v : c.values) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

TensorContainer decode_tensor(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < sizeof kTensorMagic || std::memcmp(bytes.data(), kTensorMagic, sizeof kTensorMagic) != 0) {
    throw Error(kModule, ErrorCode::BadMagic, "magic: expected \"ADATA\\0\\0\\1\"");
  }
  if (bytes.size() < kHeaderFixed) throw Error(kModule, ErrorCode::TruncatedPayload, "header: dtype/rank missing");
  TensorContainer c;
  c.dtype = get_u32(bytes.data() + 8);
  if (c.dtype != 0) throw Error(kModule, ErrorCode::UnknownDtype, "dtype: code " + std::to_string(c.dtype));
  const std::uint32_t rank = get_u32(bytes.data() + 12);
  const std::size_t dims_end = kHeaderFixed + 4 * static_cast<std::size_t>(rank);
  if (bytes.size() < dims_end) {
    throw Error(kModule, ErrorCode::TruncatedPayload, "dims: rank " + std::to_string(rank) + " exceeds file");
  }
  for (std::uint32_t i = 0; i < rank; ++i) c.dims.push_back(get_u32(bytes.data() + kHeaderFixed + 4 * i));
  const std::size_t count = c.element_count();
  const std::size_t expected = dims_end + 4 * count;
  if (bytes.size() < expected) {
    throw Error(kModule, ErrorCode::TruncatedPayload,
                "payload: " + std::to_string(bytes.size() - dims_end) + " bytes, dims imply " +
                    std::to_string(4 * count));
  }
  if (bytes.size() > expected) throw Error(kModule, ErrorCode::BadFormat, "payload: trailing bytes");
  c.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) c.values[i] = std::bit_cast<float>(get_u32(bytes.data() + dims_end + 4 * i));
  return c;
}

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  std::filesystem::path p = path;
  p += ".json";
  return p;
}

void write_tensor(const TensorContainer& container, const std::filesystem::path& path) {
  const auto bytes = encode_tensor(container);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(kModule, ErrorCode::IoFailure, "cannot write " + path.string());
  nlohmann::ordered_json meta;
  meta["name"] = container.name;
  meta["role"] = std::string(to_string(container.role));
  meta["seed"] = container.seed;
  std::ofstream side(sidecar_path(path), std::ios::trunc);
  side << meta.dump(2) << '\n';
  if (!side) throw Error(kModule, ErrorCode::IoFailure, "cannot write " + sidecar_path(path).string());
}

TensorContainer read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(kModule, ErrorCode::IoFailure, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  TensorContainer c = decode_tensor(bytes);
  std::ifstream side(sidecar_path(path));
  if (side) {
    try {
      const auto meta = nlohmann::json::parse(side);
      c.name = meta.value("name", std::string{});
      c.role = parse_tensor_role(meta.value("role", std::string("features")));
      c.seed = meta.value("seed", std::uint64_t{0});
    } catch (const nlohmann::json::exception& e) {
      throw Error(kModule, ErrorCode::BadFormat, "sidecar " + sidecar_path(path).string() + ": " + e.what());
    }
  }
  return c;
}

TensorContainer to_container(const FeatureMap& f, std::string name, std::uint64_t seed) {
  TensorContainer c;
  c.dims = to_dims({f.side(), f.side(), f.channels()});
  c.values.assign(f.data().begin(), f.data().end());
  c.name = std::move(name);
  c.role = TensorRole::Features;
  c.seed = seed;
  return c;
}

TensorContainer to_container(const SaliencyMap& s, std::string name, std::uint64_t seed) {
  TensorContainer c;
  c.dims = to_dims({s.side(), s.side()});
  c.values.assign(s.data().begin(), s.data().end());
  c.name = std::move(name);
  c.role = TensorRole::Saliency;
  c.seed = seed;
  return c;
}

TensorContainer to_container(const TokenSequence& seq, std::string name, std::uint64_t seed) {
  seq.validate();
  TensorContainer c;
  c.dims = to_dims({seq.size(), seq.dim()});
  for (const auto& t : seq.tokens) c.values.insert(c.values.end(), t.begin(), t.end());
  c.name = std::move(name);
  c.role = TensorRole::Tokens;
  c.seed = seed;
  return c;
}

TensorContainer to_container(const TextEmbedding& e, std::string name, std::uint64_t seed) {
  e.validate();
  TensorContainer c;
  c.dims = to_dims({e.length(), e.dim()});
  for (const auto& v : e.vectors) c.values.insert(c.values.end(), v.begin(), v.end());
  c.name = std::move(name);
  c.role = TensorRole::TextEmbedding;
  c.seed = seed;
  return c;
}

FeatureMap features_from(const TensorContainer& c) {
  if (c.dims.size() != 3 || c.dims[0] != c.dims[1] || c.dims[0] == 0 || c.dims[2] == 0) {
    throw Error(kModule, ErrorCode::BadFormat, "features must be a non-empty square [side, side, C] tensor");
  }
  return FeatureMap(c.dims[0], c.dims[2], std::vector<double>(c.values.begin(), c.values.end()));
}

SaliencyMap saliency_from(const TensorContainer& c) {
  if (c.dims.size() != 2 || c.dims[0] != c.dims[1] || c.dims[0] == 0) {
    throw Error(kModule, ErrorCode::BadFormat, "saliency must be a non-empty square [side, side] tensor");
  }
  const std::vector<double> raw(c.values.begin(), c.values.end());
  return normalize_saliency(c.dims[0], raw);
}

TextEmbedding embedding_from(const TensorContainer& c) {
  if (c.dims.size() != 2 || c.dims[0] == 0 || c.dims[1] == 0) {
    throw Error(kModule, ErrorCode::BadFormat, "text embedding must be a non-empty [l, D_t] tensor");
  }
  TextEmbedding e;
  e.source = EmbeddingSource::External;
  for (std::uint32_t i = 0; i < c.dims[0]; ++i) {
    const auto first = c.values.begin() + static_cast<std::ptrdiff_t>(i) * c.dims[1];
    e.vectors.emplace_back(first, first + c.dims[1]);
  }
  e.validate();
  return e;
}

}  // namespace adata
