// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace adata {

enum class ErrorCode {
  AllZeroSaliency,
  DimensionMismatch,
  InvalidArgument,
  NonFinite,
  EmptyQuestion,
  EmptyCorpus,
  NonDivisible,
  TooManyClusters,
  ZeroVector,
  BadGamma,
  EmptyTokenSet,
  BadMagic,
  TruncatedPayload,
  UnknownDtype,
  IoFailure,
  BadFormat,
  BadConfig,
};

// Process exit status buckets used by the CLI.
enum class ErrorCategory { Input = 2, Config = 3, Numeric = 4 };

std::string_view to_string(ErrorCode code);
ErrorCategory category_of(ErrorCode code);

/// Library-wide exception. `module` names the pipeline stage that raised it so
/// reports can print a qualified code such as "pooling.NonDivisible".
class Error : public std::runtime_error {
 public:
  Error(std::string module, ErrorCode code, const std::string& detail);

  const std::string& module() const noexcept { return module_; }
  ErrorCode code() const noexcept { return code_; }
  std::string qualified_code() const;
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  std::string module_;
  ErrorCode code_;
};

}  // namespace adata
