#include "leiden/text.hpp"

#include <array>
#include <cstdint>

namespace leiden {
namespace {

struct Fold {
  char32_t first;
  char32_t last;
  const char* ascii;  // nullptr marks a separator
};

// Latin-1 Supplement and Latin Extended-A.
constexpr std::array<Fold, 52> kFolds{{
    {0x00A0, 0x00BF, nullptr}, {0x00C0, 0x00C5, "a"}, {0x00C6, 0x00C6, "ae"},
    {0x00C7, 0x00C7, "c"},     {0x00C8, 0x00CB, "e"}, {0x00CC, 0x00CF, "i"},
    {0x00D0, 0x00D0, "d"},     {0x00D1, 0x00D1, "n"}, {0x00D2, 0x00D6, "o"},
    {0x00D7, 0x00D7, nullptr}, {0x00D8, 0x00D8, "o"}, {0x00D9, 0x00DC, "u"},
    {0x00DD, 0x00DD, "y"},     {0x00DE, 0x00DE, "th"}, {0x00DF, 0x00DF, "ss"},
    {0x00E0, 0x00E5, "a"},     {0x00E6, 0x00E6, "ae"}, {0x00E7, 0x00E7, "c"},
    {0x00E8, 0x00EB, "e"},     {0x00EC, 0x00EF, "i"}, {0x00F0, 0x00F0, "d"},
    {0x00F1, 0x00F1, "n"},     {0x00F2, 0x00F6, "o"}, {0x00F7, 0x00F7, nullptr},
    {0x00F8, 0x00F8, "o"},     {0x00F9, 0x00FC, "u"}, {0x00FD, 0x00FD, "y"},
    {0x00FE, 0x00FE, "th"},    {0x00FF, 0x00FF, "y"}, {0x0100, 0x0105, "a"},
    {0x0106, 0x010D, "c"},     {0x010E, 0x0111, "d"}, {0x0112, 0x011B, "e"},
    {0x011C, 0x0123, "g"},     {0x0124, 0x0127, "h"}, {0x0128, 0x0131, "i"},
    {0x0132, 0x0133, "ij"},    {0x0134, 0x0135, "j"}, {0x0136, 0x0138, "k"},
    {0x0139, 0x0142, "l"},     {0x0143, 0x014B, "n"}, {0x014C, 0x0151, "o"},
    {0x0152, 0x0153, "oe"},    {0x0154, 0x0159, "r"}, {0x015A, 0x0161, "s"},
    {0x0162, 0x0167, "t"},     {0x0168, 0x0173, "u"}, {0x0174, 0x0175, "w"},
    {0x0176, 0x0178, "y"},     {0x0179, 0x017E, "z"}, {0x017F, 0x017F, "s"},
    {0x2000, 0x206F, nullptr},
}};

// Decodes one codepoint; returns the byte length consumed, 0 on invalid input.
std::size_t decode_utf8(std::string_view s, std::size_t i, char32_t& cp) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  std::size_t len = 0;
  if (b0 < 0x80) {
    cp = b0;
    return 1;
  } else if ((b0 & 0xE0) == 0xC0) {
    cp = b0 & 0x1F;
    len = 2;
  } else if ((b0 & 0xF0) == 0xE0) {
    cp = b0 & 0x0F;
    len = 3;
  } else if ((b0 & 0xF8) == 0xF0) {
    cp = b0 & 0x07;
    len = 4;
  } else {
    return 0;
  }
  if (i + len > s.size()) return 0;
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (b & 0x3F);
  }
  return len;
}

}  // namespace

std::vector<std::string> fold_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  std::size_t i = 0;
  while (i < text.size()) {
    char32_t cp = 0;
    const std::size_t len = decode_utf8(text, i, cp);
    if (len == 0) {
      flush();
      ++i;
      continue;
    }
    if (cp < 0x80) {
      const char c = static_cast<char>(cp);
      if (c >= 'A' && c <= 'Z') {
        current.push_back(static_cast<char>(c - 'A' + 'a'));
      } else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
        current.push_back(c);
      } else {
        flush();
      }
    } else if (cp >= 0x0300 && cp <= 0x036F) {
      // combining marks: dropped without splitting the token
    } else {
      const Fold* hit = nullptr;
      for (const auto& f : kFolds) {
        if (cp >= f.first && cp <= f.last) {
          hit = &f;
          break;
        }
      }
      if (hit == nullptr) {
        current.append(text.substr(i, len));
      } else if (hit->ascii == nullptr) {
        flush();
      } else {
        current.append(hit->ascii);
      }
    }
    i += len;
  }
  flush();
  return tokens;
}

std::string fold_text(std::string_view text) { return join(fold_tokens(text)); }

std::string join(const std::vector<std::string>& tokens, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.append(sep);
    out.append(tokens[i]);
  }
  return out;
}

std::string_view trim(std::string_view s) {
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::uint64_t fnv1a64(std::string_view s, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace leiden
