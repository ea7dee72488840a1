#include "morphforest/utf8.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/locid.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "morphforest/error.hpp"

namespace morphforest::utf8 {

std::u32string decode(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  const auto* bytes = reinterpret_cast<const std::uint8_t*>(text.data());
  const auto n = static_cast<std::int32_t>(text.size());
  std::int32_t i = 0;
  while (i < n) {
    UChar32 c;
    U8_NEXT(bytes, i, n, c);
    out.push_back(c < 0 ? U'\uFFFD' : static_cast<char32_t>(c));
  }
  return out;
}

std::string encode(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t c : text) out += encode(c);
  return out;
}

std::string encode(char32_t cp) {
  std::uint8_t buf[U8_MAX_LENGTH];
  std::int32_t len = 0;
  UBool error = false;
  U8_APPEND(buf, len, U8_MAX_LENGTH, static_cast<UChar32>(cp), error);
  if (error) return "\xEF\xBF\xBD";
  return std::string(reinterpret_cast<const char*>(buf),
                     static_cast<std::size_t>(len));
}

std::size_t length(std::string_view text) {
  std::size_t count = 0;
  for (char c : text) {
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++count;
  }
  return count;
}

std::string normalize(std::string_view text, bool lowercase) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) {
    throw Error(ErrorKind::kIo, "ICU NFC normalizer unavailable");
  }
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<std::int32_t>(text.size())));
  icu::UnicodeString normalized = nfc->normalize(s, status);
  if (U_FAILURE(status)) {
    throw Error(ErrorKind::kFormat, "NFC normalization failed");
  }
  if (lowercase) {
    normalized.toLower(icu::Locale::getRoot());
    // Lowercasing can produce decomposed sequences (e.g. U+0130).
    normalized = nfc->normalize(normalized, status);
  }
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

bool is_alphabetic(std::string_view text) {
  for (char32_t c : decode(text)) {
    const auto cp = static_cast<UChar32>(c);
    if (u_isalpha(cp)) continue;
    const auto type = u_charType(cp);
    if (type == U_NON_SPACING_MARK || type == U_COMBINING_SPACING_MARK) {
      continue;
    }
    return false;
  }
  return true;
}

bool has_whitespace(std::string_view text) {
  for (char32_t c : decode(text)) {
    if (u_isUWhiteSpace(static_cast<UChar32>(c))) return true;
  }
  return false;
}

}  // namespace morphforest::utf8
