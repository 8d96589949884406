// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0

#include "adata/vocabulary.hpp"

#include <cctype>

namespace adata {

namespace {

constexpr std::size_t kGeneratedPoolSize = 10;

const char* const kFiller[] = {"what", "is", "are", "the", "in",  "this",
                               "image", "of", "there", "a", "on", "how", "which"};

const char* const kNouns[] = {"dog", "cat", "car", "person", "bird",
                              "horse", "tree", "house", "boat", "bus"};

// Coarse: global scene / counting. Medium: layout and relations. Fine: local
// attributes and object parts.
const char* const kCoarse[] = {"animals", "scene", "overall", "many", "objects",
                               "setting", "place", "weather", "activity", "count"};
const char* const kMedium[] = {"left", "right", "next", "between", "behind",
                               "holding", "near", "front", "beside", "above"};
const char* const kFine[] = {"color", "texture", "ear", "eye", "pattern",
                             "material", "shape", "logo", "fur", "tail"};

}  // namespace

Vocabulary::Vocabulary() {
  add("<unk>");
  for (const char* w : kFiller) filler_.push_back(add(w));
  for (const char* w : kNouns) nouns_.push_back(add(w));
  for (const auto* pool : {&kCoarse, &kMedium, &kFine}) {
    std::vector<TokenId> ids;
    for (const char* w : *pool) ids.push_back(add(w));
    keywords_.push_back(std::move(ids));
  }
}

const Vocabulary& Vocabulary::builtin() {
  static const Vocabulary vocab;
  return vocab;
}

TokenId Vocabulary::add(std::string word) {
  const auto id = static_cast<TokenId>(words_.size());
  index_.emplace(word, id);
  words_.push_back(std::move(word));
  return id;
}

TokenId Vocabulary::id(std::string_view word) const {
  const auto it = index_.find(std::string(word));
  return it == index_.end() ? kUnknown : it->second;
}

const std::string& Vocabulary::word(TokenId id) const {
  return id < words_.size() ? words_[id] : words_[kUnknown];
}

std::vector<TokenId> Vocabulary::tokenize(std::string_view question) const {
  std::vector<TokenId> ids;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) ids.push_back(id(current));
    current.clear();
  };
  for (char ch : question) {
    const auto uc = static_cast<unsigned char>(ch);
    if (std::isalnum(uc)) {
      current.push_back(static_cast<char>(std::tolower(uc)));
    } else {
      flush();
    }
  }
  flush();
  return ids;
}

std::vector<TokenId> Vocabulary::keyword_ids(std::size_t klass) const {
  if (klass < keywords_.size()) return keywords_[klass];
  std::vector<TokenId> ids;
  const auto base = static_cast<TokenId>(words_.size() + (klass - keywords_.size()) * kGeneratedPoolSize);
  for (std::size_t j = 0; j < kGeneratedPoolSize; ++j) ids.push_back(base + static_cast<TokenId>(j));
  return ids;
}

}  // namespace adata
