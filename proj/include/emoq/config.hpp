#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "emoq/simulation.hpp"
#include "emoq/synthetic.hpp"
#include "emoq/toxicity.hpp"

namespace emoq {

struct KeyValue {
    std::string key;
    std::string value;
    std::size_t line = 0;
};

// `key = value` lines; '#' starts a comment line, blank lines are skipped.
// A line without '=' or with an empty key is a ConfigError. A repeated key
// keeps its last value.
std::vector<KeyValue> parse_key_values(std::string_view text);

struct AppConfig {
    SimulationConfig simulation;
    std::filesystem::path lexicon;
    std::filesystem::path emoji_lexicon;
    ProviderConfig provider;
    PolicyOptions policy;
    unsigned jobs = 0;
};

// Applies recognized keys; any other key is a ConfigError naming its line.
// Relative paths resolve against `base_dir`.
void apply_config(AppConfig& config, const std::vector<KeyValue>& entries,
                  const std::filesystem::path& base_dir = {});
AppConfig load_config(const std::filesystem::path& path, AppConfig defaults = {});

void apply_synthetic_spec(SyntheticSpec& spec, const std::vector<KeyValue>& entries);
SyntheticSpec load_synthetic_spec(const std::filesystem::path& path);

// Strict numeric parsing; the key name goes into the error message.
double parse_double(std::string_view key, std::string_view value);
std::uint64_t parse_uint(std::string_view key, std::string_view value);

} // namespace emoq
