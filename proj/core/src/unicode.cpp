#include "unicode.hpp"

#include <unicode/uchar.h>
#include <unicode/ucasemap.h>
#include <unicode/utf8.h>

#include <memory>

#include "paperlink/textprep.hpp"

namespace paperlink {

namespace detail {

Decoded decode_at(std::string_view text, std::size_t offset) {
    const auto* bytes = reinterpret_cast<const std::uint8_t*>(text.data());
    const auto length = static_cast<std::int32_t>(text.size());
    auto i = static_cast<std::int32_t>(offset);
    UChar32 cp = 0;
    U8_NEXT(bytes, i, length, cp);
    return {cp, static_cast<std::size_t>(i) - offset};
}

void append_utf8(std::string& out, std::int32_t cp) {
    std::uint8_t buf[U8_MAX_LENGTH];
    std::int32_t n = 0;
    UBool error = false;
    U8_APPEND(buf, n, U8_MAX_LENGTH, cp, error);
    if (!error) out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
}

bool is_space(std::int32_t cp) { return cp >= 0 && u_isUWhiteSpace(cp); }

bool is_letter(std::int32_t cp) { return cp >= 0 && u_isalpha(cp); }

bool is_word_char(std::int32_t cp) {
    if (cp < 0) return false;
    if (u_isalnum(cp)) return true;
    const auto mask = U_GET_GC_MASK(cp);
    return (mask & U_GC_M_MASK) != 0;
}

bool is_upper(std::int32_t cp) { return cp >= 0 && (u_isupper(cp) || u_istitle(cp)); }

bool is_decimal_digit(std::int32_t cp) { return cp >= 0 && u_charType(cp) == U_DECIMAL_DIGIT_NUMBER; }

}  // namespace detail

std::string case_fold(std::string_view text) {
    if (text.empty()) return {};
    // Fast path for ASCII, which is nearly all of the corpus.
    bool ascii = true;
    for (unsigned char c : text) {
        if (c >= 0x80) {
            ascii = false;
            break;
        }
    }
    if (ascii) {
        std::string out(text);
        for (auto& c : out) {
            if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        }
        return out;
    }

    UErrorCode status = U_ZERO_ERROR;
    std::unique_ptr<UCaseMap, decltype(&ucasemap_close)> map(
        ucasemap_open(nullptr, U_FOLD_CASE_DEFAULT, &status), &ucasemap_close);
    if (U_FAILURE(status)) return std::string(text);

    std::string out(text.size() + 16, '\0');
    for (int attempt = 0; attempt < 2; ++attempt) {
        status = U_ZERO_ERROR;
        const auto n = ucasemap_utf8FoldCase(map.get(), out.data(), static_cast<std::int32_t>(out.size()),
                                             text.data(), static_cast<std::int32_t>(text.size()), &status);
        if (status == U_BUFFER_OVERFLOW_ERROR) {
            out.assign(static_cast<std::size_t>(n), '\0');
            continue;
        }
        if (U_FAILURE(status)) return std::string(text);
        out.resize(static_cast<std::size_t>(n));
        return out;
    }
    return std::string(text);
}

bool is_word(std::string_view token) {
    for (std::size_t i = 0; i < token.size();) {
        const auto d = detail::decode_at(token, i);
        if (detail::is_word_char(d.cp)) return true;
        i += d.len;
    }
    return false;
}

}  // namespace paperlink
