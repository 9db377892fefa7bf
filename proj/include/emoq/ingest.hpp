#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace emoq {

struct RawRecord {
    std::string id;
    std::optional<std::string> parent_id;
    std::string author;
    double created_at = 0.0;  // epoch seconds
    std::string text;
    bool troll = false;  // synthetic corpora only; absent in real exports

    friend bool operator==(const RawRecord&, const RawRecord&) = default;
};

struct ParseResult {
    std::vector<RawRecord> records;  // file order, duplicates collapsed
    std::size_t lines = 0;
    std::size_t malformed = 0;
    std::size_t duplicates = 0;
};

// One JSON object per line with id, parent_id (null/absent for roots),
// author, created_at and text. Malformed lines are counted and skipped; a
// duplicate id replaces the earlier record. Paths ending in ".gz" are read
// through zlib. Throws LoadError when unreadable, EmptyInputError when no
// valid record remains.
ParseResult parse_jsonl(const std::filesystem::path& path);
ParseResult parse_jsonl_text(std::string_view content);

void write_jsonl(std::ostream& out, std::span<const RawRecord> records);
std::string to_jsonl_line(const RawRecord& r);

// Records in canonical replay order: (created_at, id).
class EventStream {
public:
    EventStream() = default;
    explicit EventStream(std::vector<RawRecord> records);

    std::span<const RawRecord> records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }

    // SHA-256 over the canonical serialization; identical streams hash alike.
    std::string hash() const;

private:
    std::vector<RawRecord> records_;
};

struct ReplayEvent {
    double now;  // simulated clock: the record's own timestamp
    const RawRecord& record;
};

// Lazy replay over an EventStream.
class Replay {
public:
    class iterator {
    public:
        using difference_type = std::ptrdiff_t;
        using value_type = ReplayEvent;

        iterator() = default;
        explicit iterator(const RawRecord* p) : p_(p) {}
        ReplayEvent operator*() const { return {p_->created_at, *p_}; }
        iterator& operator++() {
            ++p_;
            return *this;
        }
        iterator operator++(int) {
            auto t = *this;
            ++p_;
            return t;
        }
        friend bool operator==(const iterator&, const iterator&) = default;

    private:
        const RawRecord* p_ = nullptr;
    };

    explicit Replay(const EventStream& s) : s_(&s) {}
    iterator begin() const { return iterator(s_->records().data()); }
    iterator end() const { return iterator(s_->records().data() + s_->size()); }

private:
    const EventStream* s_;
};

inline Replay replay(const EventStream& stream) { return Replay(stream); }

struct Conversation {
    std::string root_id;
    std::vector<RawRecord> records;  // root first, then replay order
    std::size_t orphans = 0;         // records whose ancestry ends at a missing id
};

// Groups records by root ancestor; conversations come back sorted by root id.
// A record whose ancestry ends at a missing id joins the latest conversation
// rooted at or before its timestamp (the earliest one if none). Throws
// StructuralError when there is no root or ancestry loops.
std::vector<Conversation> partition_conversations(const EventStream& stream);

} // namespace emoq
