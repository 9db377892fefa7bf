#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "emoq/emotion.hpp"
#include "emoq/lexicon.hpp"

namespace emoq {

inline constexpr double kDefaultKappa = 4.0;
inline constexpr double kMinIntensity = 0.1;
inline constexpr double kMaxIntensity = 1.0;

struct Classification {
    EmotionVector vector;
    std::optional<EmotionKind> dominant;
    double intensity = 0.0;  // 0 iff neutral, otherwise in [0.1, 1.0]
};

struct ClassifiedComment {
    std::string id;
    std::string author;
    std::optional<std::string> parent_id;
    double timestamp = 0.0;  // epoch seconds
    std::string text;
    EmotionVector vector;
    std::optional<EmotionKind> dominant;
    double intensity = 0.0;

    bool neutral() const noexcept { return !dominant.has_value(); }
};

// Bag-of-words classification. raw(e) counts tokens whose lexicon entry holds
// e plus the emoji weights for e; the vector is raw normalized by its max, the
// dominant emotion is the argmax (ties: canonical order) and the intensity is
// the dominant emotion's token density scaled by kappa, clamped to [0.1, 1].
Classification classify(std::string_view text, const Lexicon& lexicon,
                        const EmojiLexicon& emoji, double kappa = kDefaultKappa);

} // namespace emoq
