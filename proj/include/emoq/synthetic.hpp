#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>

#include "emoq/emotion.hpp"
#include "emoq/ingest.hpp"
#include "emoq/lexicon.hpp"

namespace emoq {

enum class Attachment { preferential, uniform };

std::string_view to_string(Attachment a) noexcept;

// Knobs of the synthetic corpus generator. Every comment is written from
// lexicon terms tied to exactly one emotion plus neutral filler, so the
// classifier recovers the intended emotion exactly.
struct SyntheticSpec {
    std::size_t conversations = 500;
    std::size_t comments_per_conversation = 200;  // root post included
    double troll_rate = 0.15;
    // Dominant-emotion mixture of ordinary comments, canonical order.
    std::array<double, kEmotionCount> mixture{0.12, 0.10, 0.12, 0.14, 0.08, 0.10, 0.24, 0.10};
    double neutral_rate = 0.25;
    double mean_interarrival = 12.0;  // seconds, exponential gaps
    Attachment attachment = Attachment::preferential;
    double root_bias = 0.3;        // chance a reply addresses the root post directly
    double recency = 10.0;         // attention decay scale, in comments
    double engagement = 2.0;       // extra attachment weight per unit of intensity
    double contagion = 0.3;        // chance a reply echoes a negative parent's emotion
    // Troll probability ramps linearly from troll_rate * (1 - escalation) on
    // the first reply to troll_rate * (1 + escalation) on the last.
    double escalation = 0.0;
    double start_time = 1.6e9;     // epoch seconds of the first root post
    double conversation_spacing = 86400.0;

    void validate() const;  // throws ConfigError
};

inline constexpr int kSyntheticDrawVersion = 1;

// Deterministic for a given (spec, seed, lexicon). Conversation c draws from
// its own mt19937_64 stream seeded with splitmix64(seed, c), so conversations
// are independent of each other. Draw order per reply (version 1):
// inter-arrival gap, troll flag, parent, emotion, text. Ids are
// "c<conv>-<index>" zero padded to four digits; troll rows carry "troll": true.
EventStream generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed,
                               const Lexicon& lexicon);

} // namespace emoq
