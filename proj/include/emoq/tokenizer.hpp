#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace emoq {

// Social-media aware tokenizer:
//  - lowercases ASCII letters
//  - drops URLs (http://, https://, www.) and @-mentions
//  - keeps hashtag words without the leading '#'
//  - splits emoji out as standalone tokens (ZWJ sequences and skin-tone
//    modifiers stay attached, variation selectors are removed)
//  - strips punctuation from token edges; internal hyphens/apostrophes stay
std::vector<std::string> tokenize(std::string_view text);

// True when the codepoint is treated as emoji by the tokenizer.
bool is_emoji_codepoint(char32_t cp) noexcept;

} // namespace emoq
