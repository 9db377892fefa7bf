#include "emoq/emotion.hpp"

namespace emoq {

namespace {
constexpr std::array<std::string_view, kEmotionCount> kNames{
    "anger", "fear", "anticipation", "trust", "surprise", "sadness", "joy", "disgust",
};
} // namespace

std::string_view to_string(EmotionKind e) noexcept { return kNames[index_of(e)]; }

std::optional<EmotionKind> parse_emotion(std::string_view name) noexcept {
    for (std::size_t i = 0; i < kNames.size(); ++i) {
        if (kNames[i] == name) return kAllEmotions[i];
    }
    return std::nullopt;
}

} // namespace emoq
