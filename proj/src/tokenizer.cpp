#include "emoq/tokenizer.hpp"

#include <cctype>

namespace emoq {

namespace {

struct Codepoint {
    char32_t cp;
    std::size_t offset;
    std::size_t length;
};

// Lenient UTF-8 decoder: invalid bytes decode as themselves (length 1) so
// that tokenization never fails.
std::vector<Codepoint> decode(std::string_view s) {
    std::vector<Codepoint> out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        auto b0 = static_cast<unsigned char>(s[i]);
        std::size_t len = 1;
        char32_t cp = b0;
        if (b0 >= 0xF0 && b0 < 0xF8) {
            len = 4;
            cp = b0 & 0x07;
        } else if (b0 >= 0xE0) {
            len = 3;
            cp = b0 & 0x0F;
        } else if (b0 >= 0xC0) {
            len = 2;
            cp = b0 & 0x1F;
        }
        bool ok = len == 1 || i + len <= s.size();
        for (std::size_t k = 1; ok && k < len; ++k) {
            auto b = static_cast<unsigned char>(s[i + k]);
            if ((b & 0xC0) != 0x80) {
                ok = false;
                break;
            }
            cp = (cp << 6) | (b & 0x3F);
        }
        if (!ok) {
            len = 1;
            cp = b0;
        }
        out.push_back({cp, i, len});
        i += len;
    }
    return out;
}

constexpr char32_t kZwj = 0x200D;
constexpr char32_t kVariationSelector = 0xFE0F;
constexpr char32_t kKeycap = 0x20E3;

bool is_skin_tone(char32_t cp) { return cp >= 0x1F3FB && cp <= 0x1F3FF; }
bool is_regional_indicator(char32_t cp) { return cp >= 0x1F1E6 && cp <= 0x1F1FF; }

bool is_space(char32_t cp) {
    return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == U'\f' ||
           cp == U'\v' || cp == 0x00A0 || cp == 0x2028 || cp == 0x2029;
}

bool is_edge_punct(char32_t cp) {
    if (cp < 0x80) return std::ispunct(static_cast<int>(cp)) != 0;
    switch (cp) {
    case 0x00A1: case 0x00AB: case 0x00BB: case 0x00BF:
    case 0x2013: case 0x2014: case 0x2018: case 0x2019:
    case 0x201C: case 0x201D: case 0x2026:
        return true;
    default:
        return false;
    }
}

bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }

std::string lower_ascii(std::string_view s) {
    std::string out(s);
    for (auto& c : out) {
        auto u = static_cast<unsigned char>(c);
        if (u < 0x80) c = static_cast<char>(std::tolower(u));
    }
    return out;
}

// Applies the word rules to a run of non-emoji codepoints.
void emit_word(std::string_view text, const std::vector<Codepoint>& cps, std::size_t begin,
               std::size_t end, std::vector<std::string>& out) {
    // Leading punctuation other than the '#'/'@' markers goes first.
    while (begin < end && cps[begin].cp != U'#' && cps[begin].cp != U'@' &&
           is_edge_punct(cps[begin].cp)) {
        ++begin;
    }
    if (begin >= end) return;
    if (cps[begin].cp == U'@') return;
    while (begin < end && cps[begin].cp == U'#') ++begin;
    while (begin < end && is_edge_punct(cps[begin].cp)) ++begin;
    while (end > begin && is_edge_punct(cps[end - 1].cp)) --end;
    if (begin >= end) return;
    auto first = cps[begin].offset;
    auto last = cps[end - 1].offset + cps[end - 1].length;
    out.push_back(lower_ascii(text.substr(first, last - first)));
}

void tokenize_chunk(std::string_view text, const std::vector<Codepoint>& cps, std::size_t begin,
                    std::size_t end, std::vector<std::string>& out) {
    auto chunk = lower_ascii(text.substr(cps[begin].offset,
                                         cps[end - 1].offset + cps[end - 1].length -
                                             cps[begin].offset));
    if (starts_with(chunk, "http://") || starts_with(chunk, "https://") ||
        starts_with(chunk, "www.")) {
        return;
    }

    std::size_t word_begin = begin;
    std::size_t i = begin;
    while (i < end) {
        char32_t cp = cps[i].cp;
        if (cp == kVariationSelector) {
            // A stray selector outside an emoji is dropped like punctuation.
            emit_word(text, cps, word_begin, i, out);
            word_begin = ++i;
            continue;
        }
        if (!is_emoji_codepoint(cp)) {
            ++i;
            continue;
        }
        emit_word(text, cps, word_begin, i, out);
        std::string emoji;
        auto append = [&](std::size_t k) {
            emoji.append(text.substr(cps[k].offset, cps[k].length));
        };
        append(i);
        bool flag_pair = is_regional_indicator(cp);
        ++i;
        while (i < end) {
            char32_t next = cps[i].cp;
            if (next == kVariationSelector) {
                ++i;
            } else if (is_skin_tone(next) || next == kKeycap) {
                append(i++);
            } else if (flag_pair && is_regional_indicator(next)) {
                append(i++);
                flag_pair = false;
            } else if (next == kZwj && i + 1 < end && is_emoji_codepoint(cps[i + 1].cp)) {
                append(i);
                append(i + 1);
                i += 2;
            } else {
                break;
            }
        }
        out.push_back(std::move(emoji));
        word_begin = i;
    }
    emit_word(text, cps, word_begin, end, out);
}

} // namespace

bool is_emoji_codepoint(char32_t cp) noexcept {
    return (cp >= 0x1F000 && cp <= 0x1FAFF) || (cp >= 0x2600 && cp <= 0x27BF) ||
           (cp >= 0x2300 && cp <= 0x23FF) || (cp >= 0x2B00 && cp <= 0x2BFF) || cp == 0x203C ||
           cp == 0x2049 || cp == 0x3030 || cp == 0x303D;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    auto cps = decode(text);
    std::size_t i = 0;
    while (i < cps.size()) {
        while (i < cps.size() && is_space(cps[i].cp)) ++i;
        std::size_t start = i;
        while (i < cps.size() && !is_space(cps[i].cp)) ++i;
        if (i > start) tokenize_chunk(text, cps, start, i, out);
    }
    return out;
}

} // namespace emoq
