#include "emoq/classifier.hpp"

#include <algorithm>
#include <map>

#include "emoq/tokenizer.hpp"

namespace emoq {

Classification classify(std::string_view text, const Lexicon& lexicon, const EmojiLexicon& emoji,
                        double kappa) {
    Classification out;
    const auto tokens = tokenize(text);

    // Distinct tokens in sorted order, so that the float sums do not depend
    // on token order.
    std::map<std::string_view, double> counts;
    for (const auto& tok : tokens) counts[tok] += 1.0;

    std::array<double, kEmotionCount> raw{};
    for (const auto& [tok, n] : counts) {
        if (const auto* set = lexicon.find(std::string(tok))) {
            for (auto e : kAllEmotions) {
                if (set->contains(e)) raw[index_of(e)] += n;
            }
        } else if (const auto* v = emoji.find(tok)) {
            for (std::size_t i = 0; i < kEmotionCount; ++i) raw[i] += n * v->weights[i];
        }
    }

    // Strict '>' keeps the earliest emotion in canonical order on ties.
    std::size_t best = 0;
    for (std::size_t i = 1; i < kEmotionCount; ++i) {
        if (raw[i] > raw[best]) best = i;
    }
    const double peak = raw[best];
    if (peak <= 0.0) return out;

    for (std::size_t i = 0; i < kEmotionCount; ++i) out.vector.weights[i] = raw[i] / peak;
    out.dominant = kAllEmotions[best];
    const double density = peak / static_cast<double>(std::max<std::size_t>(1, tokens.size()));
    out.intensity = std::clamp(kappa * density, kMinIntensity, kMaxIntensity);
    return out;
}

} // namespace emoq
