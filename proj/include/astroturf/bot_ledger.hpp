#pragma once

#include <algorithm>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "astroturf/stream.hpp"
#include "astroturf/trend_classifier.hpp"

namespace astroturf {

struct BotRecord {
    AccountId account_id = 0;
    std::string handle;
    UtcSeconds account_created_at = 0;
    UtcSeconds first_attack_at = 0;
    UtcSeconds last_attack_at = 0;
    std::int64_t attack_count = 0; // distinct attack events joined
    PlatformStatus status = PlatformStatus::active;
    std::int64_t undeleted_tweet_count = 0;
    std::optional<UtcSeconds> last_undeleted_tweet_at;
    std::optional<std::int64_t> silent_gap_months;
    bool default_handle = false;
};

/// True when the handle carries a run of 8 or more consecutive decimal
/// digits, the shape of an unchanged platform-assigned handle.
inline bool has_default_handle(std::string_view handle) {
    int run = 0;
    for (char c : handle) {
        if (c >= '0' && c <= '9') {
            if (++run >= 8) return true;
        } else {
            run = 0;
        }
    }
    return false;
}

/// Whole calendar months between the last undeleted tweet and the last
/// attack, floored at 0 when the visible tweet postdates the attack. Absent
/// when the account has no visible tweets at all.
inline std::optional<std::int64_t> silent_gap(const BotRecord& record) {
    if (!record.last_undeleted_tweet_at) return std::nullopt;
    return std::max<std::int64_t>(0, months_between(*record.last_undeleted_tweet_at, record.last_attack_at));
}

inline std::int64_t time_to_first_attack_seconds(const BotRecord& record) {
    return record.first_attack_at - record.account_created_at;
}

/// Per-account aggregate over a shard of attack events. Shards over a
/// partition of the events merge associatively: min of firsts, max of
/// lasts, sum of distinct-event counts.
struct LedgerShard {
    struct Entry {
        UtcSeconds first_attack_at = std::numeric_limits<UtcSeconds>::max();
        UtcSeconds last_attack_at = std::numeric_limits<UtcSeconds>::min();
        std::int64_t attack_count = 0;
    };
    std::map<AccountId, Entry> entries;
};

/// Folds a list of attack events into a shard. Participant attack times are
/// the account's own tweet times within each event when the trace is
/// available, the event window otherwise.
inline LedgerShard accumulate_events(const std::vector<AttackEvent>& events,
                                     const std::map<AccountId, AccountTrace>& accounts) {
    LedgerShard shard;
    for (const auto& ev : events) {
        std::map<AccountId, std::pair<UtcSeconds, UtcSeconds>> span;
        for (AccountId id : ev.participant_ids) {
            span[id] = {ev.window_start, ev.window_end};
        }
        for (auto& [id, window] : span) {
            auto acct_it = accounts.find(id);
            if (acct_it != accounts.end()) {
                UtcSeconds lo = std::numeric_limits<UtcSeconds>::max();
                UtcSeconds hi = std::numeric_limits<UtcSeconds>::min();
                for (const auto& [tweet_id, at] : acct_it->second.tweets) {
                    if (ev.tweet_ids.count(tweet_id)) {
                        lo = std::min(lo, at);
                        hi = std::max(hi, at);
                    }
                }
                if (lo <= hi) window = {lo, hi};
            }
            LedgerShard::Entry& e = shard.entries[id];
            e.first_attack_at = std::min(e.first_attack_at, window.first);
            e.last_attack_at = std::max(e.last_attack_at, window.second);
            e.attack_count += 1;
        }
    }
    return shard;
}

inline LedgerShard merge_shards(LedgerShard a, const LedgerShard& b) {
    for (const auto& [id, e] : b.entries) {
        LedgerShard::Entry& dst = a.entries[id];
        dst.first_attack_at = std::min(dst.first_attack_at, e.first_attack_at);
        dst.last_attack_at = std::max(dst.last_attack_at, e.last_attack_at);
        dst.attack_count += e.attack_count;
    }
    return a;
}

/// Joins the merged shard with account traces, the deletion index, and the
/// status file into final BotRecords. A missing status defaults to active
/// with a warning on `warnings`.
inline std::vector<BotRecord> finalize_ledger(const LedgerShard& shard,
                                              const std::map<AccountId, AccountTrace>& accounts,
                                              const DeletionIndex& deletions,
                                              const std::map<AccountId, AccountStatus>& statuses,
                                              std::ostream* warnings = nullptr) {
    std::vector<BotRecord> ledger;
    ledger.reserve(shard.entries.size());
    for (const auto& [id, e] : shard.entries) {
        BotRecord rec;
        rec.account_id = id;
        rec.first_attack_at = e.first_attack_at;
        rec.last_attack_at = e.last_attack_at;
        rec.attack_count = e.attack_count;

        auto acct_it = accounts.find(id);
        if (acct_it != accounts.end()) {
            rec.handle = acct_it->second.handle;
            rec.account_created_at = acct_it->second.account_created_at;
            for (const auto& [tweet_id, at] : acct_it->second.tweets) {
                if (deletions.count(tweet_id)) continue;
                ++rec.undeleted_tweet_count;
                if (!rec.last_undeleted_tweet_at || at > *rec.last_undeleted_tweet_at) {
                    rec.last_undeleted_tweet_at = at;
                }
            }
        }
        rec.default_handle = has_default_handle(rec.handle);

        auto st_it = statuses.find(id);
        if (st_it != statuses.end()) {
            rec.status = st_it->second.status;
        } else {
            rec.status = PlatformStatus::active;
            if (warnings) *warnings << "warning: no status for account " << id << ", assuming active\n";
        }
        rec.silent_gap_months = silent_gap(rec);
        ledger.push_back(std::move(rec));
    }
    return ledger;
}

/// Ledger over the fake trends only: accounts enter via participation in at
/// least one attack event of a trend ruled fake.
inline std::vector<BotRecord> build_bot_ledger(const std::vector<TrendDetection>& detections,
                                               const std::map<AccountId, AccountTrace>& accounts,
                                               const DeletionIndex& deletions,
                                               const std::map<AccountId, AccountStatus>& statuses,
                                               std::ostream* warnings = nullptr) {
    std::vector<AttackEvent> fake_events;
    for (const auto& d : detections) {
        if (!d.verdict.is_fake) continue;
        fake_events.insert(fake_events.end(), d.events.begin(), d.events.end());
    }
    return finalize_ledger(accumulate_events(fake_events, accounts), accounts, deletions, statuses, warnings);
}

inline const char* kBotsCsvHeader =
    "account_id,handle,account_created_at,first_attack_at,last_attack_at,attack_count,status,"
    "undeleted_tweet_count,last_undeleted_tweet_at,silent_gap_months,default_handle";

inline void write_bots_csv(std::ostream& out, const std::vector<BotRecord>& ledger) {
    out << kBotsCsvHeader << '\n';
    for (const auto& r : ledger) {
        out << r.account_id << ',' << r.handle << ',' << format_iso8601(r.account_created_at) << ','
            << format_iso8601(r.first_attack_at) << ',' << format_iso8601(r.last_attack_at) << ','
            << r.attack_count << ',' << to_string(r.status) << ',' << r.undeleted_tweet_count << ','
            << (r.last_undeleted_tweet_at ? format_iso8601(*r.last_undeleted_tweet_at) : "") << ','
            << (r.silent_gap_months ? std::to_string(*r.silent_gap_months) : "") << ','
            << (r.default_handle ? "true" : "false") << '\n';
    }
}

inline std::vector<BotRecord> load_bots_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw StreamError(0, "cannot open bots csv: " + path);
    std::vector<BotRecord> ledger;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        if (row == 1) {
            if (line != kBotsCsvHeader) throw StreamError(row, "unexpected bots csv header");
            continue;
        }
        std::vector<std::string> fields;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                fields.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        fields.push_back(cur);
        if (fields.size() != 11) throw StreamError(row, "expected 11 fields");
        try {
            BotRecord r;
            r.account_id = std::stoll(fields[0]);
            r.handle = fields[1];
            r.account_created_at = parse_iso8601(fields[2]).value();
            r.first_attack_at = parse_iso8601(fields[3]).value();
            r.last_attack_at = parse_iso8601(fields[4]).value();
            r.attack_count = std::stoll(fields[5]);
            auto status = status_from_string(fields[6]);
            if (!status) throw std::runtime_error("bad status");
            r.status = *status;
            r.undeleted_tweet_count = std::stoll(fields[7]);
            if (!fields[8].empty()) r.last_undeleted_tweet_at = parse_iso8601(fields[8]).value();
            if (!fields[9].empty()) r.silent_gap_months = std::stoll(fields[9]);
            r.default_handle = fields[10] == "true";
            ledger.push_back(std::move(r));
        } catch (const std::exception&) {
            throw StreamError(row, "malformed bots csv row");
        }
    }
    return ledger;
}

} // namespace astroturf
