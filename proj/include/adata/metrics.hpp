// Copyright 2026 The adata Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>

namespace adata {

/// Adjusted Rand index between two labelings of the same items. Returns 1 when
/// both labelings are a single cluster (or all singletons) and agree.
/// Throws DimensionMismatch for unequal lengths, InvalidArgument when empty.
double adjusted_rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b);

}  // namespace adata
