// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0
//
// Line-oriented corpus files. One item per line:
//
//   <id id id ...>\t<p1,p2,...,pn>
//
// Blank lines and lines starting with '#' are skipped.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "adata/controller.hpp"

namespace adata {

/// Throws BadFormat naming the offending line.
GranularityCorpus parse_corpus(std::istream& in);
void format_corpus(const GranularityCorpus& corpus, std::ostream& out);

/// Throws IoFailure / BadFormat.
GranularityCorpus read_corpus(const std::filesystem::path& path);
void write_corpus(const GranularityCorpus& corpus, const std::filesystem::path& path);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

}  // namespace adata
