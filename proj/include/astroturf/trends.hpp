#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "astroturf/stream.hpp"
#include "astroturf/text.hpp"
#include "astroturf/time.hpp"

namespace astroturf {

struct TrendSnapshot {
    UtcSeconds observed_at = 0;
    std::vector<std::pair<int, std::string>> entries; // (rank, trend name), ranks 1..k
};

/// Time-ordered ranked trend snapshots. Lookup semantics are a step
/// function: the snapshot in force at time t is the latest one with
/// observed_at <= t.
class TrendTimeline {
public:
    TrendTimeline() = default;
    explicit TrendTimeline(std::vector<TrendSnapshot> snapshots) : snapshots_(std::move(snapshots)) {
        std::sort(snapshots_.begin(), snapshots_.end(),
                  [](const TrendSnapshot& a, const TrendSnapshot& b) { return a.observed_at < b.observed_at; });
    }

    const std::vector<TrendSnapshot>& snapshots() const { return snapshots_; }
    bool empty() const { return snapshots_.empty(); }

    const TrendSnapshot* snapshot_at(UtcSeconds t) const {
        auto it = std::upper_bound(snapshots_.begin(), snapshots_.end(), t,
                                   [](UtcSeconds v, const TrendSnapshot& s) { return v < s.observed_at; });
        if (it == snapshots_.begin()) return nullptr;
        return &*std::prev(it);
    }

    /// Indices [first, last) of snapshots observed in [t - horizon,
    /// t + horizon]. Streams are time-ordered, so consecutive lookups mostly
    /// share a range; callers can cache per range.
    std::pair<std::size_t, std::size_t> active_range(UtcSeconds t, std::int64_t horizon_seconds) const {
        auto lo = std::lower_bound(snapshots_.begin(), snapshots_.end(), t - horizon_seconds,
                                   [](const TrendSnapshot& s, UtcSeconds v) { return s.observed_at < v; });
        auto hi = std::upper_bound(lo, snapshots_.end(), t + horizon_seconds,
                                   [](UtcSeconds v, const TrendSnapshot& s) { return v < s.observed_at; });
        return {static_cast<std::size_t>(lo - snapshots_.begin()), static_cast<std::size_t>(hi - snapshots_.begin())};
    }

    std::set<std::string> names_in_range(std::pair<std::size_t, std::size_t> range) const {
        std::set<std::string> names;
        for (std::size_t i = range.first; i < range.second; ++i) {
            for (const auto& [rank, name] : snapshots_[i].entries) names.insert(name);
        }
        return names;
    }

    /// Union of trend names from all snapshots observed in [t - horizon,
    /// t + horizon]. The forward horizon exists because attack tweets land
    /// minutes before the trend's first listing.
    std::set<std::string> trends_active_at(UtcSeconds t, std::int64_t horizon_seconds) const {
        return names_in_range(active_range(t, horizon_seconds));
    }

private:
    std::vector<TrendSnapshot> snapshots_;
};

/// Default horizon for joining tweets to trends, both directions.
constexpr std::int64_t kDefaultTrendHorizonSeconds = 24 * 3600;

/// Loads `observed_at,rank,trend_name` CSV. Rows are grouped by timestamp;
/// within a snapshot ranks must be 1..k in row order and names unique.
inline TrendTimeline load_trend_timeline(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw StreamError(0, "cannot open trend timeline: " + path);
    std::map<UtcSeconds, TrendSnapshot> by_time;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        if (row == 1) {
            if (line != "observed_at,rank,trend_name") {
                throw StreamError(row, "expected header 'observed_at,rank,trend_name'");
            }
            continue;
        }
        std::istringstream ss(line);
        std::string ts_s, rank_s, name;
        if (!std::getline(ss, ts_s, ',') || !std::getline(ss, rank_s, ',') || !std::getline(ss, name)) {
            throw StreamError(row, "expected 3 comma-separated fields");
        }
        auto ts = parse_iso8601(ts_s);
        if (!ts) throw StreamError(row, "observed_at is not an ISO-8601 UTC timestamp");
        int rank = 0;
        try {
            rank = std::stoi(rank_s);
        } catch (const std::exception&) {
            throw StreamError(row, "rank is not an integer");
        }
        if (rank < 1) throw StreamError(row, "rank must be >= 1");
        TrendSnapshot& snap = by_time[*ts];
        snap.observed_at = *ts;
        const int expected = static_cast<int>(snap.entries.size()) + 1;
        if (rank != expected) {
            throw StreamError(row, "non-monotonic rank " + rank_s + " (expected " +
                                       std::to_string(expected) + ") at " + ts_s);
        }
        for (const auto& [r, n] : snap.entries) {
            if (n == name) throw StreamError(row, "duplicate trend '" + name + "' in snapshot " + ts_s);
        }
        snap.entries.emplace_back(rank, name);
    }
    std::vector<TrendSnapshot> snapshots;
    snapshots.reserve(by_time.size());
    for (auto& [t, snap] : by_time) snapshots.push_back(std::move(snap));
    return TrendTimeline(std::move(snapshots));
}

/// Matcher for trend keywords in tweet text. Candidates are matched
/// case-insensitively under Turkish folding: hashtag candidates against
/// whole tokens, bare keywords (possibly multi-word) against contiguous
/// token subsequences. Matched names come back sorted.
class TrendMatcher {
public:
    explicit TrendMatcher(const std::set<std::string>& candidates) {
        for (const auto& name : candidates) {
            if (name.empty()) continue;
            if (name[0] == '#') {
                hashtags_.emplace(fold_case(name), name);
            } else {
                Ngram c;
                c.name = name;
                for (auto& w : split_whitespace(name)) c.words.push_back(fold_case(w));
                if (!c.words.empty()) ngrams_.push_back(std::move(c));
            }
        }
    }

    /// Candidate names whose keyword occurs in `tokens` (pre-folded).
    std::vector<std::string> match(const std::vector<std::string>& folded_tokens) const {
        std::set<std::string> hits;
        for (const auto& tok : folded_tokens) {
            auto it = hashtags_.find(tok);
            if (it != hashtags_.end()) hits.insert(it->second);
        }
        for (const auto& c : ngrams_) {
            if (contains_subsequence(folded_tokens, c.words)) hits.insert(c.name);
        }
        return {hits.begin(), hits.end()};
    }

    /// Marks each token consumed by any matched candidate; used to strip
    /// mentions before the lexicon rules run.
    std::vector<bool> consumed_mask(const std::vector<std::string>& folded_tokens) const {
        std::vector<bool> mask(folded_tokens.size(), false);
        for (size_t i = 0; i < folded_tokens.size(); ++i) {
            if (hashtags_.count(folded_tokens[i])) mask[i] = true;
        }
        for (const auto& c : ngrams_) {
            if (folded_tokens.size() < c.words.size()) continue;
            for (size_t i = 0; i + c.words.size() <= folded_tokens.size(); ++i) {
                if (std::equal(c.words.begin(), c.words.end(),
                               folded_tokens.begin() + static_cast<std::ptrdiff_t>(i))) {
                    for (size_t k = 0; k < c.words.size(); ++k) mask[i + k] = true;
                }
            }
        }
        return mask;
    }

private:
    struct Ngram {
        std::string name;
        std::vector<std::string> words; // folded
    };

    static bool contains_subsequence(const std::vector<std::string>& tokens, const std::vector<std::string>& words) {
        if (tokens.size() < words.size()) return false;
        for (size_t i = 0; i + words.size() <= tokens.size(); ++i) {
            if (std::equal(words.begin(), words.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) return true;
        }
        return false;
    }

    std::unordered_map<std::string, std::string> hashtags_; // folded -> original
    std::vector<Ngram> ngrams_;
};

inline std::vector<std::string> fold_tokens(std::string_view text) {
    std::vector<std::string> folded;
    for (auto& tok : split_whitespace(text)) folded.push_back(fold_case(tok));
    return folded;
}

/// Every candidate whose full keyword occurs in `text`.
inline std::vector<std::string> extract_trend_mentions(std::string_view text,
                                                       const std::set<std::string>& candidates) {
    if (candidates.empty()) return {};
    return TrendMatcher(candidates).match(fold_tokens(text));
}

inline void write_trend_timeline(std::ostream& out, const TrendTimeline& timeline) {
    out << "observed_at,rank,trend_name\n";
    for (const auto& snap : timeline.snapshots()) {
        for (const auto& [rank, name] : snap.entries) {
            out << format_iso8601(snap.observed_at) << ',' << rank << ',' << name << '\n';
        }
    }
}

} // namespace astroturf
