// Copyright 2026 The typobench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace typobench {

std::string sha256_hex(std::string_view data);

/// First eight bytes of SHA-256(data), big-endian.
std::uint64_t hash64(std::string_view data);

/// Stable per-record seed. Depends only on the triple, so the order in which
/// records are processed (or the worker count) never changes any draw.
std::uint64_t derive_record_seed(std::uint64_t global_seed,
                                 std::string_view image_id,
                                 std::string_view stream);

std::string base64_encode(std::string_view bytes);

}  // namespace typobench
