#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace emoq {

// The eight lexicon emotions. The declaration order is canonical: it is used
// for tie-breaking and for every serialized column order.
enum class EmotionKind : std::uint8_t {
    anger,
    fear,
    anticipation,
    trust,
    surprise,
    sadness,
    joy,
    disgust,
};

inline constexpr std::size_t kEmotionCount = 8;

inline constexpr std::array<EmotionKind, kEmotionCount> kAllEmotions{
    EmotionKind::anger,    EmotionKind::fear,    EmotionKind::anticipation,
    EmotionKind::trust,    EmotionKind::surprise, EmotionKind::sadness,
    EmotionKind::joy,      EmotionKind::disgust,
};

constexpr std::size_t index_of(EmotionKind e) noexcept { return static_cast<std::size_t>(e); }

std::string_view to_string(EmotionKind e) noexcept;
std::optional<EmotionKind> parse_emotion(std::string_view name) noexcept;

// joy, trust and anticipation receive the positive-emotion allowance.
constexpr bool is_positive(EmotionKind e) noexcept {
    return e == EmotionKind::joy || e == EmotionKind::trust || e == EmotionKind::anticipation;
}

// Small bitset of emotions, used for lexicon entries.
class EmotionSet {
public:
    constexpr EmotionSet() = default;

    constexpr void insert(EmotionKind e) noexcept { bits_ |= bit(e); }
    constexpr bool contains(EmotionKind e) const noexcept { return (bits_ & bit(e)) != 0; }
    constexpr bool empty() const noexcept { return bits_ == 0; }
    constexpr std::uint8_t bits() const noexcept { return bits_; }

    friend constexpr bool operator==(EmotionSet, EmotionSet) = default;

private:
    static constexpr std::uint8_t bit(EmotionKind e) noexcept {
        return static_cast<std::uint8_t>(1U << index_of(e));
    }
    std::uint8_t bits_ = 0;
};

// Weight per emotion, each in [0, 1]. The zero vector is a neutral comment.
struct EmotionVector {
    std::array<double, kEmotionCount> weights{};

    double operator[](EmotionKind e) const noexcept { return weights[index_of(e)]; }
    double& operator[](EmotionKind e) noexcept { return weights[index_of(e)]; }

    bool is_zero() const noexcept {
        for (double w : weights) {
            if (w != 0.0) return false;
        }
        return true;
    }

    static EmotionVector unit(EmotionKind e) noexcept {
        EmotionVector v;
        v[e] = 1.0;
        return v;
    }

    friend bool operator==(const EmotionVector&, const EmotionVector&) = default;
};

} // namespace emoq
