#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace paperlink::detail {

/// One decoded UTF-8 code point. Invalid bytes decode to cp < 0 with len 1.
struct Decoded {
    std::int32_t cp;
    std::size_t len;
};

Decoded decode_at(std::string_view text, std::size_t offset);
void append_utf8(std::string& out, std::int32_t cp);

bool is_space(std::int32_t cp);
bool is_word_char(std::int32_t cp);  // letter, digit or combining mark
bool is_letter(std::int32_t cp);
bool is_upper(std::int32_t cp);
bool is_decimal_digit(std::int32_t cp);

}  // namespace paperlink::detail
