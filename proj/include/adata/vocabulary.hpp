// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace adata {

using TokenId = std::uint32_t;

/// Word-level lookup for the synthetic question corpus. Not a subword
/// tokenizer: questions are lowercased and split on non-alphanumerics, and
/// words outside the table map to kUnknown.
class Vocabulary {
 public:
  static constexpr TokenId kUnknown = 0;

  /// The built-in table used by the synthetic corpus generator.
  static const Vocabulary& builtin();

  TokenId id(std::string_view word) const;
  const std::string& word(TokenId id) const;
  std::size_t size() const noexcept { return words_.size(); }

  std::vector<TokenId> tokenize(std::string_view question) const;

  /// Ids of the question words shared across all granularity classes.
  const std::vector<TokenId>& filler_ids() const noexcept { return filler_; }
  /// Ids of object nouns shared across all granularity classes.
  const std::vector<TokenId>& noun_ids() const noexcept { return nouns_; }
  /// Keyword pool for class k: 0 coarse, 1 medium, 2 fine. Classes beyond the
  /// third receive generated ids past the end of the table.
  std::vector<TokenId> keyword_ids(std::size_t klass) const;

 private:
  Vocabulary();
  TokenId add(std::string word);

  std::vector<std::string> words_;
  std::unordered_map<std::string, TokenId> index_;
  std::vector<TokenId> filler_;
  std::vector<TokenId> nouns_;
  std::vector<std::vector<TokenId>> keywords_;
};

}  // namespace adata
