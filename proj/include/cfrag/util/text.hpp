#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cfrag::text {

bool is_valid_utf8(std::string_view s);

// Number of code points; assumes valid UTF-8.
std::size_t utf8_length(std::string_view s);

// Whitespace-separated token count.
std::size_t count_words(std::string_view s);

std::string_view trim(std::string_view s);
std::string to_lower_ascii(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

// Shortest round-trip decimal. Integral values keep a trailing ".0"
// so the literal reads as a float in the answer language.
std::string format_number(double v);

// Fixed-point rendering for reports.
std::string format_fixed(double v, int decimals);

std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

// 64-bit FNV-1a. Stable across platforms; used for prompt fixtures and seeds.
std::uint64_t fnv1a64(std::string_view s);
std::string hex64(std::uint64_t v);

// Splits a root seed into an independent per-stage seed.
std::uint64_t derive_seed(std::uint64_t root, std::string_view stage);

}  // namespace cfrag::text
