#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace dupq {

// 64-bit FNV-1a. Used for stable content addressing (image keys,
// corpus hashes); not for anything adversarial.
std::uint64_t fnv1a64(std::string_view data);
std::string fnv1a64_hex(std::string_view data);

// Deterministic Fisher-Yates shuffle. std::shuffle's draw sequence is
// implementation-defined, so artifacts that must be byte-identical
// across toolchains go through this instead.
template <typename T>
void det_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

// Shortest round-trip decimal form of a double (std::to_chars).
std::string format_double(double value);

// Fixed two-decimal percentage string, e.g. 0.4343 -> "43.43".
std::string format_pct2(double fraction);

std::string read_file(const std::filesystem::path& path);

// Write via temp file + rename so readers never observe partial output.
void atomic_write_file(const std::filesystem::path& path, std::string_view content);

std::string iso8601_utc_now();

std::string to_lower_ascii(std::string_view s);
std::string trim(std::string_view s);
std::string collapse_whitespace(std::string_view s);
std::vector<std::string> split_on(std::string_view s, char delim);

}  // namespace dupq
