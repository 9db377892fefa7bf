#include "emoq/ingest.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "emoq/error.hpp"
#include "emoq/hashing.hpp"

namespace emoq {

namespace {

using nlohmann::json;

std::string read_plain(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

std::string read_gzip(const std::filesystem::path& path) {
    gzFile f = gzopen(path.string().c_str(), "rb");
    if (!f) throw LoadError("cannot open " + path.string());
    std::string out;
    std::array<char, 1 << 16> buf{};
    int n = 0;
    while ((n = gzread(f, buf.data(), static_cast<unsigned>(buf.size()))) > 0) {
        out.append(buf.data(), static_cast<std::size_t>(n));
    }
    int err = 0;
    const char* msg = gzerror(f, &err);
    const bool failed = n < 0 || (err != Z_OK && err != Z_STREAM_END);
    const std::string what = failed ? msg : "";
    gzclose(f);
    if (failed) throw LoadError("gzip read failed for " + path.string() + ": " + what);
    return out;
}

std::optional<RawRecord> record_from_json(const json& j) {
    if (!j.is_object()) return std::nullopt;
    auto id = j.find("id");
    auto author = j.find("author");
    auto created = j.find("created_at");
    auto text = j.find("text");
    if (id == j.end() || !id->is_string() || id->get_ref<const std::string&>().empty()) {
        return std::nullopt;
    }
    if (author == j.end() || !author->is_string()) return std::nullopt;
    if (created == j.end() || !created->is_number()) return std::nullopt;
    if (text == j.end() || !text->is_string()) return std::nullopt;
    RawRecord r;
    r.id = id->get<std::string>();
    r.author = author->get<std::string>();
    r.created_at = created->get<double>();
    if (!(r.created_at >= 0.0)) return std::nullopt;
    r.text = text->get<std::string>();
    if (auto p = j.find("parent_id"); p != j.end() && !p->is_null()) {
        if (!p->is_string()) return std::nullopt;
        if (!p->get_ref<const std::string&>().empty()) r.parent_id = p->get<std::string>();
    }
    if (auto t = j.find("troll"); t != j.end() && t->is_boolean()) r.troll = t->get<bool>();
    return r;
}

bool canonical_less(const RawRecord& a, const RawRecord& b) {
    if (a.created_at != b.created_at) return a.created_at < b.created_at;
    return a.id < b.id;
}

} // namespace

ParseResult parse_jsonl_text(std::string_view content) {
    ParseResult result;
    std::unordered_map<std::string, std::size_t> seen;
    while (!content.empty()) {
        auto nl = content.find('\n');
        auto line = content.substr(0, nl);
        content = nl == std::string_view::npos ? std::string_view{} : content.substr(nl + 1);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
        ++result.lines;
        json j = json::parse(line, nullptr, false);
        auto rec = j.is_discarded() ? std::nullopt : record_from_json(j);
        if (!rec) {
            ++result.malformed;
            continue;
        }
        if (auto it = seen.find(rec->id); it != seen.end()) {
            ++result.duplicates;
            result.records[it->second] = std::move(*rec);
            continue;
        }
        seen.emplace(rec->id, result.records.size());
        result.records.push_back(std::move(*rec));
    }
    return result;
}

ParseResult parse_jsonl(const std::filesystem::path& path) {
    const bool gz = path.extension() == ".gz";
    auto result = parse_jsonl_text(gz ? read_gzip(path) : read_plain(path));
    if (result.records.empty()) throw EmptyInputError("no valid records in " + path.string());
    return result;
}

std::string to_jsonl_line(const RawRecord& r) {
    json j;
    j["id"] = r.id;
    j["parent_id"] = r.parent_id ? json(*r.parent_id) : json(nullptr);
    j["author"] = r.author;
    j["created_at"] = r.created_at;
    j["text"] = r.text;
    if (r.troll) j["troll"] = true;
    return j.dump();
}

void write_jsonl(std::ostream& out, std::span<const RawRecord> records) {
    for (const auto& r : records) out << to_jsonl_line(r) << '\n';
}

EventStream::EventStream(std::vector<RawRecord> records) : records_(std::move(records)) {
    std::stable_sort(records_.begin(), records_.end(), canonical_less);
}

std::string EventStream::hash() const {
    std::string buf;
    for (const auto& r : records_) {
        buf += to_jsonl_line(r);
        buf += '\n';
    }
    return sha256_hex(buf);
}

std::vector<Conversation> partition_conversations(const EventStream& stream) {
    const auto records = stream.records();
    std::unordered_map<std::string, std::size_t> by_id;
    for (std::size_t i = 0; i < records.size(); ++i) by_id.emplace(records[i].id, i);

    // root_of[i]: index of the root ancestor, or kMissing when the chain ends at
    // a missing id. Resolved iteratively with memoization.
    constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
    constexpr std::size_t kMissing = static_cast<std::size_t>(-2);
    std::vector<std::size_t> root_of(records.size(), kUnset);
    std::vector<char> on_path(records.size(), 0);
    for (std::size_t i = 0; i < records.size(); ++i) {
        std::vector<std::size_t> path;
        std::size_t cur = i;
        std::size_t found = kUnset;
        while (true) {
            if (root_of[cur] != kUnset) {
                found = root_of[cur];
                break;
            }
            if (on_path[cur]) throw StructuralError("reply cycle through " + records[cur].id);
            on_path[cur] = 1;
            path.push_back(cur);
            if (!records[cur].parent_id) {
                found = cur;
                break;
            }
            auto it = by_id.find(*records[cur].parent_id);
            if (it == by_id.end()) {
                found = kMissing;
                break;
            }
            cur = it->second;
        }
        for (auto p : path) {
            root_of[p] = found;
            on_path[p] = 0;
        }
    }

    std::vector<std::size_t> roots;  // replay order
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (!records[i].parent_id) roots.push_back(i);
    }
    if (roots.empty()) throw StructuralError("stream has no root record");

    std::map<std::string, Conversation> convs;
    for (auto r : roots) {
        auto& c = convs[records[r].id];
        c.root_id = records[r].id;
        c.records.push_back(records[r]);
    }
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (!records[i].parent_id) continue;
        std::size_t root = root_of[i];
        bool orphan = false;
        if (root == kMissing) {
            orphan = true;
            root = roots.front();
            for (auto r : roots) {
                if (records[r].created_at <= records[i].created_at) root = r;
            }
        }
        auto& c = convs[records[root].id];
        c.records.push_back(records[i]);
        if (orphan) ++c.orphans;
    }

    std::vector<Conversation> out;
    out.reserve(convs.size());
    for (auto& [id, c] : convs) out.push_back(std::move(c));
    return out;
}

} // namespace emoq
