#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <deque>
#include <optional>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "astroturf/time.hpp"

namespace astroturf {

using Json = nlohmann::json;

using TweetId = std::int64_t;
using AccountId = std::int64_t;

struct TweetRecord {
    TweetId tweet_id = 0;
    AccountId author_id = 0;
    std::string author_handle;
    UtcSeconds created_at = 0;
    UtcSeconds account_created_at = 0;
    std::string text;
    bool is_retweet = false;

    bool operator==(const TweetRecord&) const = default;
};

struct DeletionNotice {
    TweetId tweet_id = 0;
    AccountId author_id = 0;
    UtcSeconds deleted_at = 0;

    bool operator==(const DeletionNotice&) const = default;
};

using StreamEvent = std::variant<TweetRecord, DeletionNotice>;

inline UtcSeconds event_time(const StreamEvent& ev) {
    if (const auto* t = std::get_if<TweetRecord>(&ev)) return t->created_at;
    return std::get<DeletionNotice>(ev).deleted_at;
}

/// Error raised by stream parsing and ordering checks. `line` is 1-based,
/// 0 when no line context applies.
class StreamError : public std::runtime_error {
public:
    StreamError(std::size_t line, const std::string& reason)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + reason : reason),
          line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

namespace detail {

inline UtcSeconds require_timestamp(const Json& obj, const char* field, std::size_t line) {
    if (!obj.contains(field) || !obj[field].is_string()) {
        throw StreamError(line, std::string("missing or non-string field '") + field + "'");
    }
    auto t = parse_iso8601(obj[field].get<std::string>());
    if (!t) throw StreamError(line, std::string("field '") + field + "' is not an ISO-8601 UTC timestamp");
    return *t;
}

inline std::int64_t require_int(const Json& obj, const char* field, std::size_t line) {
    if (!obj.contains(field) || !obj[field].is_number_integer()) {
        throw StreamError(line, std::string("missing or non-integer field '") + field + "'");
    }
    return obj[field].get<std::int64_t>();
}

inline std::string require_string(const Json& obj, const char* field, std::size_t line) {
    if (!obj.contains(field) || !obj[field].is_string()) {
        throw StreamError(line, std::string("missing or non-string field '") + field + "'");
    }
    return obj[field].get<std::string>();
}

inline bool require_bool(const Json& obj, const char* field, std::size_t line) {
    if (!obj.contains(field) || !obj[field].is_boolean()) {
        throw StreamError(line, std::string("missing or non-boolean field '") + field + "'");
    }
    return obj[field].get<bool>();
}

} // namespace detail

/// Parses one newline-delimited JSON event. Timestamps are validated and
/// normalized to epoch seconds; any schema violation throws StreamError with
/// the given line number.
inline StreamEvent parse_stream_event(std::string_view line, std::size_t line_no = 0) {
    Json obj = Json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
        throw StreamError(line_no, "not a JSON object");
    }
    if (!obj.contains("type") || !obj["type"].is_string()) {
        throw StreamError(line_no, "missing event 'type'");
    }
    const std::string type = obj["type"].get<std::string>();
    if (type == "tweet") {
        TweetRecord t;
        t.tweet_id = detail::require_int(obj, "id", line_no);
        t.author_id = detail::require_int(obj, "author_id", line_no);
        t.author_handle = detail::require_string(obj, "handle", line_no);
        t.created_at = detail::require_timestamp(obj, "created_at", line_no);
        t.account_created_at = detail::require_timestamp(obj, "account_created_at", line_no);
        t.text = detail::require_string(obj, "text", line_no);
        t.is_retweet = detail::require_bool(obj, "is_retweet", line_no);
        if (t.created_at < t.account_created_at) {
            throw StreamError(line_no, "tweet created before its account");
        }
        return t;
    }
    if (type == "delete") {
        DeletionNotice d;
        d.tweet_id = detail::require_int(obj, "tweet_id", line_no);
        d.author_id = detail::require_int(obj, "author_id", line_no);
        d.deleted_at = detail::require_timestamp(obj, "deleted_at", line_no);
        return d;
    }
    throw StreamError(line_no, "unknown event type '" + type + "'");
}

inline std::string serialize_stream_event(const StreamEvent& ev) {
    Json obj;
    if (const auto* t = std::get_if<TweetRecord>(&ev)) {
        obj["type"] = "tweet";
        obj["id"] = t->tweet_id;
        obj["author_id"] = t->author_id;
        obj["handle"] = t->author_handle;
        obj["created_at"] = format_iso8601(t->created_at);
        obj["account_created_at"] = format_iso8601(t->account_created_at);
        obj["text"] = t->text;
        obj["is_retweet"] = t->is_retweet;
    } else {
        const auto& d = std::get<DeletionNotice>(ev);
        obj["type"] = "delete";
        obj["tweet_id"] = d.tweet_id;
        obj["author_id"] = d.author_id;
        obj["deleted_at"] = format_iso8601(d.deleted_at);
    }
    return obj.dump();
}

/// Ordered single-pass reader over an NDJSON event stream.
///
/// Archives are nearly ordered: events within a 60-second skew window are
/// buffered and re-sorted, anything later than that is rejected with an
/// ordering error. The emitted sequence is non-decreasing in timestamp and
/// stable (ties keep file order), so replays are deterministic.
class StreamReader {
public:
    static constexpr std::int64_t kSkewSeconds = 60;

    explicit StreamReader(std::istream& in) : in_(in) {}

    /// Next event in timestamp order, or nullopt at end of stream.
    std::optional<StreamEvent> next() {
        while (ready_.empty()) {
            std::string line;
            if (!std::getline(in_, line)) {
                flush_buffer();
                break;
            }
            ++line_no_;
            if (line.empty()) continue;
            StreamEvent ev = parse_stream_event(line, line_no_);
            const UtcSeconds t = event_time(ev);
            if (t < watermark_) {
                throw StreamError(line_no_, "event is " + std::to_string(watermark_ - t) +
                                                "s older than the " + std::to_string(kSkewSeconds) +
                                                "s reorder window");
            }
            if (t > max_seen_) {
                max_seen_ = t;
                watermark_ = max_seen_ - kSkewSeconds;
            }
            buffer_.push(Entry{t, seq_++, std::move(ev)});
            drain_until(watermark_);
        }
        if (ready_.empty()) return std::nullopt;
        StreamEvent ev = std::move(ready_.front());
        ready_.pop_front();
        return ev;
    }

    std::size_t line_number() const { return line_no_; }

private:
    struct Entry {
        UtcSeconds t;
        std::uint64_t seq;
        StreamEvent ev;
    };
    struct Later {
        bool operator()(const Entry& a, const Entry& b) const {
            return a.t != b.t ? a.t > b.t : a.seq > b.seq;
        }
    };

    void drain_until(UtcSeconds limit) {
        while (!buffer_.empty() && buffer_.top().t <= limit) {
            ready_.push_back(std::move(const_cast<Entry&>(buffer_.top()).ev));
            buffer_.pop();
        }
    }

    void flush_buffer() {
        while (!buffer_.empty()) {
            ready_.push_back(std::move(const_cast<Entry&>(buffer_.top()).ev));
            buffer_.pop();
        }
    }

    std::istream& in_;
    std::priority_queue<Entry, std::vector<Entry>, Later> buffer_;
    std::deque<StreamEvent> ready_;
    std::size_t line_no_ = 0;
    std::uint64_t seq_ = 0;
    UtcSeconds max_seen_ = std::numeric_limits<UtcSeconds>::min();
    UtcSeconds watermark_ = std::numeric_limits<UtcSeconds>::min();
};

/// Reads a whole stream file in order. Convenience for fixtures and tools
/// that do not need incremental consumption.
inline std::vector<StreamEvent> read_stream_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw StreamError(0, "cannot open stream file: " + path);
    StreamReader reader(in);
    std::vector<StreamEvent> events;
    while (auto ev = reader.next()) events.push_back(std::move(*ev));
    return events;
}

enum class PlatformStatus { active, suspended, not_found };

inline const char* to_string(PlatformStatus s) {
    switch (s) {
        case PlatformStatus::active: return "active";
        case PlatformStatus::suspended: return "suspended";
        case PlatformStatus::not_found: return "not_found";
    }
    return "active";
}

inline std::optional<PlatformStatus> status_from_string(std::string_view s) {
    if (s == "active") return PlatformStatus::active;
    if (s == "suspended") return PlatformStatus::suspended;
    if (s == "not_found") return PlatformStatus::not_found;
    return std::nullopt;
}

struct AccountStatus {
    AccountId account_id = 0;
    PlatformStatus status = PlatformStatus::active;
    UtcSeconds checked_at = 0;
};

/// Loads `account_id,status,checked_at`. One status per account; duplicates
/// are rejected.
inline std::map<AccountId, AccountStatus> load_account_statuses(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw StreamError(0, "cannot open status file: " + path);
    std::map<AccountId, AccountStatus> out;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        if (row == 1) {
            if (line != "account_id,status,checked_at") {
                throw StreamError(row, "expected header 'account_id,status,checked_at'");
            }
            continue;
        }
        std::istringstream ss(line);
        std::string id_s, status_s, checked_s;
        if (!std::getline(ss, id_s, ',') || !std::getline(ss, status_s, ',') ||
            !std::getline(ss, checked_s)) {
            throw StreamError(row, "expected 3 comma-separated fields");
        }
        AccountStatus st;
        try {
            st.account_id = std::stoll(id_s);
        } catch (const std::exception&) {
            throw StreamError(row, "account_id is not an integer");
        }
        auto status = status_from_string(status_s);
        if (!status) throw StreamError(row, "unknown status '" + status_s + "'");
        st.status = *status;
        auto checked = parse_iso8601(checked_s);
        if (!checked) throw StreamError(row, "checked_at is not an ISO-8601 UTC timestamp");
        st.checked_at = *checked;
        if (!out.emplace(st.account_id, st).second) {
            throw StreamError(row, "duplicate status for account " + id_s);
        }
    }
    return out;
}

inline void write_account_statuses(std::ostream& out, const std::map<AccountId, AccountStatus>& statuses) {
    out << "account_id,status,checked_at\n";
    for (const auto& [id, st] : statuses) {
        out << id << ',' << to_string(st.status) << ',' << format_iso8601(st.checked_at) << '\n';
    }
}

} // namespace astroturf
