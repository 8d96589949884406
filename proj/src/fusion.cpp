// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0

#include "adata/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adata/error.hpp"
#include "adata/rng.hpp"

namespace adata {

namespace {

constexpr const char* kModule = "fusion";

}  // namespace

void ProjectorBank::validate() const {
  if (maps.empty()) throw Error(kModule, ErrorCode::InvalidArgument, "projector bank is empty");
  for (const auto& map : maps) {
    if (map.weight.rows() != output_dim() || map.weight.cols() != input_dim() ||
        map.bias.size() != output_dim()) {
      throw Error(kModule, ErrorCode::DimensionMismatch, "projector shapes differ within bank");
    }
    if (!map.weight.all_finite() ||
        !std::all_of(map.bias.begin(), map.bias.end(), [](double v) { return std::isfinite(v); })) {
      throw Error(kModule, ErrorCode::NonFinite, "projector weights are not finite");
    }
  }
}

ProjectorBank make_projector_bank(std::size_t count, std::size_t input_dim, std::size_t output_dim,
                                  std::uint64_t seed) {
  if (count == 0 || input_dim == 0 || output_dim == 0) {
    throw Error(kModule, ErrorCode::InvalidArgument, "projector bank dimensions must be positive");
  }
  ProjectorBank bank;
  const double scale = 1.0 / std::sqrt(static_cast<double>(input_dim));
  for (std::size_t g = 0; g < count; ++g) {
    Rng rng(derive_seed(seed, 0xB0 + g));
    LinearMap map{Matrix(output_dim, input_dim), std::vector<double>(output_dim, 0.0)};
    for (double& w : map.weight.data()) w = scale * rng.normal();
    bank.maps.push_back(std::move(map));
  }
  return bank;
}

std::vector<std::vector<double>> project(std::span<const std::vector<double>> tokens,
                                         const ProjectorBank& bank, std::size_t gamma) {
  if (gamma >= bank.size()) {
    throw Error(kModule, ErrorCode::BadGamma,
                "gamma " + std::to_string(gamma) + " outside bank of " + std::to_string(bank.size()));
  }
  const LinearMap& map = bank.maps[gamma];
  std::vector<std::vector<double>> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (t.size() != map.weight.cols()) {
      throw Error(kModule, ErrorCode::DimensionMismatch,
                  "token dim " + std::to_string(t.size()) + " != projector input " +
                      std::to_string(map.weight.cols()));
    }
    auto y = matvec(map.weight, t);
    for (std::size_t d = 0; d < y.size(); ++d) y[d] += map.bias[d];
    out.push_back(std::move(y));
  }
  return out;
}

TokenSequence assemble(std::span<const std::vector<double>> pixel_tokens,
                       std::span<const std::vector<double>> semantic_tokens,
                       std::span<const std::vector<double>> text_tokens) {
  TokenSequence seq;
  seq.tokens.reserve(pixel_tokens.size() + semantic_tokens.size() + text_tokens.size());
  auto append = [&seq](std::span<const std::vector<double>> group, TokenRole role) {
    for (const auto& t : group) {
      if (!seq.tokens.empty() && t.size() != seq.tokens.front().size()) {
        throw Error(kModule, ErrorCode::DimensionMismatch,
                    std::string(to_string(role)) + " token dim " + std::to_string(t.size()) +
                        " != " + std::to_string(seq.tokens.front().size()));
      }
      seq.tokens.push_back(t);
      seq.roles.push_back(role);
    }
  };
  append(pixel_tokens, TokenRole::Pixel);
  append(semantic_tokens, TokenRole::Semantic);
  append(text_tokens, TokenRole::Text);
  return seq;
}

TokenBudget token_budget(const TokenSequence& sequence) {
  sequence.validate();
  TokenBudget b;
  for (TokenRole role : sequence.roles) {
    switch (role) {
      case TokenRole::Pixel: ++b.n_pixel; break;
      case TokenRole::Semantic: ++b.n_semantic; break;
      case TokenRole::Text: ++b.n_text; break;
    }
  }
  b.total = sequence.size();
  b.overhead_ratio =
      b.n_pixel == 0 ? 0.0 : static_cast<double>(b.n_semantic) / static_cast<double>(b.n_pixel);
  return b;
}

}  // namespace adata
