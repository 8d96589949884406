// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0

#include "adata/error.hpp"

namespace adata {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::AllZeroSaliency: return "AllZeroSaliency";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::EmptyQuestion: return "EmptyQuestion";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::NonDivisible: return "NonDivisible";
    case ErrorCode::TooManyClusters: return "TooManyClusters";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::BadGamma: return "BadGamma";
    case ErrorCode::EmptyTokenSet: return "EmptyTokenSet";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedPayload: return "TruncatedPayload";
    case ErrorCode::UnknownDtype: return "UnknownDtype";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::BadFormat: return "BadFormat";
    case ErrorCode::BadConfig: return "BadConfig";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::AllZeroSaliency:
    case ErrorCode::NonFinite:
    case ErrorCode::ZeroVector:
      return ErrorCategory::Numeric;
    case ErrorCode::NonDivisible:
    case ErrorCode::TooManyClusters:
    case ErrorCode::BadGamma:
    case ErrorCode::BadConfig:
      return ErrorCategory::Config;
    default:
      return ErrorCategory::Input;
  }
}

Error::Error(std::string module, ErrorCode code, const std::string& detail)
    : std::runtime_error(module + "." + std::string(to_string(code)) + ": " + detail),
      module_(std::move(module)),
      code_(code) {}

std::string Error::qualified_code() const {
  return module_ + "." + std::string(to_string(code_));
}

}  // namespace adata
