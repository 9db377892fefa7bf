#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "emoq/emotion.hpp"

namespace emoq {

struct LoadSummary {
    std::size_t lines = 0;
    std::size_t accepted = 0;      // rows that produced an association
    std::size_t malformed = 0;     // counted and skipped
    std::size_t unknown_emotion = 0;
};

// Word -> emotion associations (weight 1.0 per association).
class Lexicon {
public:
    void add(std::string term, EmotionKind e);

    // nullptr when the term carries no emotion.
    const EmotionSet* find(const std::string& term) const;

    std::size_t size() const noexcept { return terms_.size(); }
    bool empty() const noexcept { return terms_.empty(); }

    // Terms associated with exactly one emotion, sorted. Used by the
    // synthetic corpus generator to control classification exactly.
    std::vector<std::string> exclusive_terms(EmotionKind e) const;

private:
    std::unordered_map<std::string, EmotionSet> terms_;
};

// Emoji codepoint sequence -> emotion vector. Keys are stored without
// variation selectors (U+FE0F) so that "❤" and "❤️" resolve alike.
class EmojiLexicon {
public:
    void add(std::string_view emoji, const EmotionVector& v);
    const EmotionVector* find(std::string_view emoji) const;
    std::size_t size() const noexcept { return entries_.size(); }

private:
    std::unordered_map<std::string, EmotionVector> entries_;
};

// Reads the tab-separated `term<TAB>emotion<TAB>0|1` word-emotion format.
// Only flag-1 rows naming one of the eight emotions are kept; valence rows
// (positive/negative) and unknown names are skipped. Throws LoadError when
// the file cannot be opened.
Lexicon load_lexicon(const std::filesystem::path& path, LoadSummary* summary = nullptr);
Lexicon parse_lexicon(std::string_view content, LoadSummary* summary = nullptr);

// `emoji<TAB>emotion=weight[,emotion=weight...]`; weights outside [0,1] make
// the line malformed.
EmojiLexicon load_emoji_lexicon(const std::filesystem::path& path, LoadSummary* summary = nullptr);
EmojiLexicon parse_emoji_lexicon(std::string_view content, LoadSummary* summary = nullptr);

// Drops U+FE0F from a UTF-8 string.
std::string strip_variation_selectors(std::string_view s);

} // namespace emoq
