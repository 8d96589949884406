// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0

#include "adata/corpus_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>

#include "adata/error.hpp"

namespace adata {

namespace {

constexpr const char* kModule = "harness";

[[noreturn]] void bad_line(std::size_t line_no, const std::string& why) {
  throw Error(kModule, ErrorCode::BadFormat, "corpus line " + std::to_string(line_no) + ": " + why);
}

template <typename T>
T parse_number(std::string_view text, std::size_t line_no) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) bad_line(line_no, "bad number '" + std::string(text) + "'");
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    out.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

GranularityCorpus parse_corpus(std::istream& in) {
  GranularityCorpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      bad_line(line_no, "expected exactly one tab");
    }
    CorpusItem item;
    for (std::string_view tok : split(std::string_view(line).substr(0, tab), ' ')) {
      if (tok.empty()) continue;
      item.token_ids.push_back(parse_number<TokenId>(tok, line_no));
    }
    if (item.token_ids.empty()) bad_line(line_no, "no token ids");
    for (std::string_view p : split(std::string_view(line).substr(tab + 1), ',')) {
      item.label.push_back(parse_number<double>(p, line_no));
    }
    corpus.items.push_back(std::move(item));
  }
  if (corpus.items.empty()) throw Error(kModule, ErrorCode::EmptyCorpus, "corpus has no items");
  corpus.validate(corpus.items.front().label.size());
  return corpus;
}

void format_corpus(const GranularityCorpus& corpus, std::ostream& out) {
  for (const auto& item : corpus.items) {
    for (std::size_t i = 0; i < item.token_ids.size(); ++i) out << (i ? " " : "") << item.token_ids[i];
    out << '\t';
    for (std::size_t k = 0; k < item.label.size(); ++k) out << (k ? "," : "") << format_double(item.label[k]);
    out << '\n';
  }
}

GranularityCorpus read_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(kModule, ErrorCode::IoFailure, "cannot open " + path.string());
  return parse_corpus(in);
}

void write_corpus(const GranularityCorpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  format_corpus(corpus, out);
  if (!out) throw Error(kModule, ErrorCode::IoFailure, "cannot write " + path.string());
}

}  // namespace adata
