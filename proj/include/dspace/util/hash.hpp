#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace dspace::util {

/// 64-bit FNV-1a; used for cache keys and config fingerprints, not security.
std::uint64_t fnv1a(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

}  // namespace dspace::util
