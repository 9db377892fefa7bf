#include "emoq/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "emoq/error.hpp"

namespace emoq {

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

template <typename Fn>
void for_each_line(std::string_view content, Fn&& fn) {
    while (!content.empty()) {
        auto nl = content.find('\n');
        auto line = content.substr(0, nl);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        fn(line);
        if (nl == std::string_view::npos) break;
        content.remove_prefix(nl + 1);
    }
}

bool valid_term(std::string_view t) {
    if (t.empty()) return false;
    return std::none_of(t.begin(), t.end(), [](char c) {
        auto u = static_cast<unsigned char>(c);
        return std::isspace(u) || std::isupper(u);
    });
}

bool is_valence(std::string_view name) { return name == "positive" || name == "negative"; }

} // namespace

void Lexicon::add(std::string term, EmotionKind e) { terms_[std::move(term)].insert(e); }

const EmotionSet* Lexicon::find(const std::string& term) const {
    auto it = terms_.find(term);
    return it == terms_.end() ? nullptr : &it->second;
}

std::vector<std::string> Lexicon::exclusive_terms(EmotionKind e) const {
    EmotionSet only;
    only.insert(e);
    std::vector<std::string> out;
    for (const auto& [term, set] : terms_) {
        if (set == only) out.push_back(term);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string strip_variation_selectors(std::string_view s) {
    static constexpr std::string_view kFe0f = "\xEF\xB8\x8F";
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
        if (s.compare(i, kFe0f.size(), kFe0f) == 0) {
            i += kFe0f.size();
            continue;
        }
        out.push_back(s[i++]);
    }
    return out;
}

void EmojiLexicon::add(std::string_view emoji, const EmotionVector& v) {
    entries_[strip_variation_selectors(emoji)] = v;
}

const EmotionVector* EmojiLexicon::find(std::string_view emoji) const {
    auto it = entries_.find(strip_variation_selectors(emoji));
    return it == entries_.end() ? nullptr : &it->second;
}

Lexicon parse_lexicon(std::string_view content, LoadSummary* summary) {
    Lexicon lex;
    LoadSummary s;
    for_each_line(content, [&](std::string_view line) {
        if (trim(line).empty()) return;
        ++s.lines;
        auto t1 = line.find('\t');
        auto t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
        if (t2 == std::string_view::npos || line.find('\t', t2 + 1) != std::string_view::npos) {
            ++s.malformed;
            return;
        }
        auto term = trim(line.substr(0, t1));
        auto emotion = trim(line.substr(t1 + 1, t2 - t1 - 1));
        auto flag = trim(line.substr(t2 + 1));
        if (!valid_term(term) || (flag != "0" && flag != "1")) {
            ++s.malformed;
            return;
        }
        auto kind = parse_emotion(emotion);
        if (!kind) {
            if (!is_valence(emotion)) ++s.unknown_emotion;
            return;
        }
        if (flag == "1") {
            lex.add(std::string(term), *kind);
            ++s.accepted;
        }
    });
    if (summary) *summary = s;
    return lex;
}

Lexicon load_lexicon(const std::filesystem::path& path, LoadSummary* summary) {
    return parse_lexicon(read_file(path), summary);
}

EmojiLexicon parse_emoji_lexicon(std::string_view content, LoadSummary* summary) {
    EmojiLexicon lex;
    LoadSummary s;
    for_each_line(content, [&](std::string_view line) {
        if (trim(line).empty() || line.front() == '#') return;
        ++s.lines;
        auto tab = line.find('\t');
        if (tab == std::string_view::npos) {
            ++s.malformed;
            return;
        }
        auto emoji = trim(line.substr(0, tab));
        auto rest = trim(line.substr(tab + 1));
        if (emoji.empty() || rest.empty()) {
            ++s.malformed;
            return;
        }
        EmotionVector v;
        bool ok = true;
        bool any = false;
        while (!rest.empty() && ok) {
            auto comma = rest.find(',');
            auto pair = trim(rest.substr(0, comma));
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
            auto eq = pair.find('=');
            if (eq == std::string_view::npos) {
                ok = false;
                break;
            }
            auto kind = parse_emotion(trim(pair.substr(0, eq)));
            auto num = trim(pair.substr(eq + 1));
            double w = 0.0;
            auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), w);
            if (ec != std::errc{} || ptr != num.data() + num.size() || !(w >= 0.0 && w <= 1.0)) {
                ok = false;
                break;
            }
            if (!kind) {
                ++s.unknown_emotion;
                continue;
            }
            v[*kind] = w;
            any = true;
        }
        if (!ok || !any) {
            ++s.malformed;
            return;
        }
        lex.add(emoji, v);
        ++s.accepted;
    });
    if (summary) *summary = s;
    return lex;
}

EmojiLexicon load_emoji_lexicon(const std::filesystem::path& path, LoadSummary* summary) {
    return parse_emoji_lexicon(read_file(path), summary);
}

} // namespace emoq
