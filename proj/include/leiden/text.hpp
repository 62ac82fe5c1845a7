#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace leiden {

/// Lower-cases ASCII and Latin-1/Latin Extended-A letters, maps accented
/// letters to their unaccented base, drops combining marks and turns every
/// punctuation or whitespace run into a single separator. Codepoints outside
/// those blocks are kept verbatim. Invalid UTF-8 bytes act as separators.
std::vector<std::string> fold_tokens(std::string_view text);

/// fold_tokens joined with single spaces.
std::string fold_text(std::string_view text);

std::string join(const std::vector<std::string>& tokens, std::string_view sep = " ");

/// Strips leading and trailing ASCII whitespace.
std::string_view trim(std::string_view s);

/// Splits on a single delimiter character; empty fields are kept.
std::vector<std::string_view> split(std::string_view s, char delim);

/// 64-bit FNV-1a; stable across platforms and used for fingerprints and seeds.
std::uint64_t fnv1a64(std::string_view s, std::uint64_t basis = 0xcbf29ce484222325ULL);

}  // namespace leiden
