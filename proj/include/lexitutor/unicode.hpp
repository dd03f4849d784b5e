#pragma once

#include <string>
#include <string_view>

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include "lexitutor/util.hpp"

namespace lexitutor {

namespace detail {
inline const icu::Normalizer2& nfc_instance() {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* n = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status) || n == nullptr)
        throw io_error("ICU NFC normalizer unavailable");
    return *n;
}
}  // namespace detail

// Canonical composition (NFC). Ethiopic and precomposed Latin diacritics come
// out byte-identical to their decomposed twins.
inline std::string nfc(std::string_view utf8) {
    const auto& norm = detail::nfc_instance();
    icu::UnicodeString in = icu::UnicodeString::fromUTF8(
        icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
    UErrorCode status = U_ZERO_ERROR;
    icu::UnicodeString out = norm.normalize(in, status);
    if (U_FAILURE(status)) throw data_error("unicode normalization failed");
    std::string result;
    out.toUTF8String(result);
    return result;
}

// Locale-independent full case folding, for dedup keys and comparisons.
inline std::string case_fold(std::string_view utf8) {
    icu::UnicodeString s = icu::UnicodeString::fromUTF8(
        icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
    s.foldCase();
    std::string result;
    s.toUTF8String(result);
    return result;
}

}  // namespace lexitutor
