// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>

#include "sciexp/script/value.hpp"

namespace sciexp::session {

/// Wire encoding. Arrays become {"__array__": {"shape", "dtype", "data"}} with
/// row-major data and complex entries as [re, im]; non-finite floats are the
/// strings "nan", "inf", "-inf".
nlohmann::json encode(const script::Value& v);
script::Value decode(const nlohmann::json& j);

/// FNV-1a over the canonical encoding.
std::uint64_t digest(const script::Value& v);
std::string digest_hex(const script::Value& v);
std::string hex64(std::uint64_t h);
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 1469598103934665603ull);

/// Agent-facing text: arrays with fewer than 10 entries in full, larger ones
/// as "array of shape [...]".
std::string summarize(const script::Value& v);

inline constexpr std::size_t full_listing_limit = 10;

}  // namespace sciexp::session
