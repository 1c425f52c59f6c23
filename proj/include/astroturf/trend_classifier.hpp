#pragma once

#include <algorithm>
#include <atomic>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "astroturf/lexicon.hpp"
#include "astroturf/stream.hpp"
#include "astroturf/trends.hpp"
#include "astroturf/windows.hpp"

namespace astroturf {

/// tweet_id -> deleted_at. Last notice per tweet wins; notices whose tweet
/// never appears in-stream are retained (a 1% sample may carry either half
/// of the pair).
using DeletionIndex = std::map<TweetId, UtcSeconds>;

enum class DetectorKind { lexicon, isolation_forest };

inline const char* to_string(DetectorKind d) {
    return d == DetectorKind::lexicon ? "lexicon" : "isolation_forest";
}

enum class DetectionMode { sample_1pct, full };

inline const char* to_string(DetectionMode m) {
    return m == DetectionMode::sample_1pct ? "sample_1pct" : "full";
}

inline std::optional<DetectionMode> mode_from_string(std::string_view s) {
    if (s == "sample_1pct") return DetectionMode::sample_1pct;
    if (s == "full") return DetectionMode::full;
    return std::nullopt;
}

struct TrendVerdict {
    std::string trend_name;
    std::int64_t attack_tweet_count = 0;
    std::int64_t deleted_attack_count = 0;
    double deletion_ratio = 0.0; // 0 when attack_tweet_count is 0
    bool is_fake = false;
    DetectorKind detector = DetectorKind::lexicon;
    UtcSeconds decided_at = 0;
};

struct AttackEvent {
    std::string trend_name;
    UtcSeconds window_start = 0;
    UtcSeconds window_end = 0;
    std::set<AccountId> participant_ids;
    std::set<TweetId> tweet_ids;
    std::set<TweetId> deleted_tweet_ids;
};

struct TrendThresholds {
    std::int64_t min_attack_tweets = 4;   // "at least 4 tweets"
    double deletion_ratio_threshold = 0.45; // strictly more than 45% deleted
};

/// The two-rule decision tree over detected attack tweets.
inline bool passes_fake_trend_rules(std::int64_t attack_tweet_count, double deletion_ratio,
                                    const TrendThresholds& thresholds = {}) {
    return attack_tweet_count >= thresholds.min_attack_tweets &&
           deletion_ratio > thresholds.deletion_ratio_threshold;
}

inline DeletionIndex build_deletion_index(const std::vector<StreamEvent>& events) {
    DeletionIndex index;
    for (const auto& ev : events) {
        if (const auto* d = std::get_if<DeletionNotice>(&ev)) index[d->tweet_id] = d->deleted_at;
    }
    return index;
}

inline TrendVerdict classify_trend(const std::string& trend, const std::set<TweetId>& attack_ids,
                                   const DeletionIndex& deletions, const TrendThresholds& thresholds = {},
                                   DetectorKind detector = DetectorKind::lexicon) {
    TrendVerdict v;
    v.trend_name = trend;
    v.detector = detector;
    v.attack_tweet_count = static_cast<std::int64_t>(attack_ids.size());
    for (TweetId id : attack_ids) {
        if (deletions.count(id)) ++v.deleted_attack_count;
    }
    v.deletion_ratio = v.attack_tweet_count == 0
                           ? 0.0
                           : static_cast<double>(v.deleted_attack_count) / static_cast<double>(v.attack_tweet_count);
    v.is_fake = passes_fake_trend_rules(v.attack_tweet_count, v.deletion_ratio, thresholds);
    return v;
}

/// A tweet observed mentioning one trend; all the classifier needs once the
/// text has been matched and rule-checked.
struct TrendTweet {
    TweetId tweet_id = 0;
    AccountId author_id = 0;
    UtcSeconds created_at = 0;
    bool is_lexicon = false; // retweets are never lexicon
};

constexpr std::int64_t kDefaultEventGapSeconds = 60;

/// Merges consecutive attack tweets whose inter-arrival gap is at most
/// `gap_seconds` into discrete events ("posted in bulk within a small time
/// period"). Input must be time-sorted.
inline std::vector<AttackEvent> extract_attack_events(const std::string& trend,
                                                      const std::vector<TrendTweet>& attack_tweets,
                                                      const DeletionIndex& deletions,
                                                      std::int64_t gap_seconds = kDefaultEventGapSeconds) {
    std::vector<AttackEvent> events;
    for (const auto& t : attack_tweets) {
        if (events.empty() || t.created_at - events.back().window_end > gap_seconds) {
            AttackEvent ev;
            ev.trend_name = trend;
            ev.window_start = t.created_at;
            ev.window_end = t.created_at;
            events.push_back(std::move(ev));
        }
        AttackEvent& ev = events.back();
        ev.window_end = t.created_at;
        ev.participant_ids.insert(t.author_id);
        ev.tweet_ids.insert(t.tweet_id);
        if (deletions.count(t.tweet_id)) ev.deleted_tweet_ids.insert(t.tweet_id);
    }
    return events;
}

/// Minimal per-account trace kept during the scan: enough for the bot
/// ledger, no text.
struct AccountTrace {
    std::string handle;
    UtcSeconds account_created_at = 0;
    std::vector<std::pair<TweetId, UtcSeconds>> tweets; // in stream order
};

/// Single ordered pass over an event stream: joins tweets to the trends
/// active around their timestamp, evaluates the lexicon rules while the text
/// is in hand, and accumulates the deletion index and per-account traces.
/// Tweet text is dropped immediately after matching.
struct StreamScan {
    std::map<std::string, std::vector<TrendTweet>> trend_tweets; // per trend, time-sorted
    DeletionIndex deletions;
    std::map<AccountId, AccountTrace> accounts;
    std::int64_t tweet_count = 0;
    std::int64_t deletion_count = 0;
};

inline StreamScan scan_stream(StreamReader& reader, const TrendTimeline& timeline,
                              std::int64_t horizon_seconds = kDefaultTrendHorizonSeconds) {
    StreamScan scan;
    // The active candidate set only changes at snapshot boundaries; events
    // arrive in time order, so one matcher serves long stretches of stream.
    std::pair<std::size_t, std::size_t> cached_range{1, 0};
    std::optional<TrendMatcher> matcher;
    while (auto ev = reader.next()) {
        if (const auto* tweet = std::get_if<TweetRecord>(&*ev)) {
            ++scan.tweet_count;
            AccountTrace& acct = scan.accounts[tweet->author_id];
            acct.handle = tweet->author_handle;
            acct.account_created_at = tweet->account_created_at;
            acct.tweets.emplace_back(tweet->tweet_id, tweet->created_at);

            const auto range = timeline.active_range(tweet->created_at, horizon_seconds);
            if (range.first >= range.second) continue;
            if (range != cached_range) {
                matcher.emplace(timeline.names_in_range(range));
                cached_range = range;
            }
            auto mentions = matcher->match(fold_tokens(tweet->text));
            if (mentions.empty()) continue;
            const bool lexicon = classify_tweet(*tweet, mentions).is_lexicon;
            for (const auto& trend : mentions) {
                scan.trend_tweets[trend].push_back(
                    TrendTweet{tweet->tweet_id, tweet->author_id, tweet->created_at, lexicon});
            }
        } else {
            const auto& d = std::get<DeletionNotice>(*ev);
            ++scan.deletion_count;
            scan.deletions[d.tweet_id] = d.deleted_at;
        }
    }
    return scan;
}

struct ClassifierConfig {
    DetectionMode mode = DetectionMode::full;
    ForestParams forest;
    TrendThresholds thresholds;
    std::int64_t gap_seconds = kDefaultEventGapSeconds;
    int threads = 1;
};

/// One trend's outcome: the verdict, its attack events, and the flagged ids.
struct TrendDetection {
    TrendVerdict verdict;
    std::vector<AttackEvent> events;
    std::set<TweetId> attack_tweet_ids;
};

namespace detail {

inline bool forest_applicable(const std::vector<MinuteWindow>& windows) {
    if (windows.size() < kMinWindowsForForest) return false;
    for (const auto& w : windows) {
        if (w.count() != windows.front().count()) return true;
    }
    return false;
}

inline TrendDetection classify_one_trend(const std::string& trend, const std::vector<TrendTweet>& tweets,
                                         const DeletionIndex& deletions, const ClassifierConfig& config) {
    std::set<TweetId> flagged;
    DetectorKind detector = DetectorKind::lexicon;

    bool use_forest = false;
    if (config.mode == DetectionMode::full) {
        std::vector<std::pair<TweetId, UtcSeconds>> ids;
        ids.reserve(tweets.size());
        for (const auto& t : tweets) ids.emplace_back(t.tweet_id, t.created_at);
        auto windows = group_minute_windows(ids);
        // Degenerate trends (too few or flat windows) fall back to the
        // lexicon path below.
        if (forest_applicable(windows)) {
            use_forest = true;
            detector = DetectorKind::isolation_forest;
            ForestParams params = config.forest;
            params.seed ^= fnv1a(trend);
            flagged = flag_attack_tweets(ids, params);
        }
    }
    if (!use_forest) {
        // Attack tweets in the sample path are deleted lexicon tweets.
        for (const auto& t : tweets) {
            if (t.is_lexicon && deletions.count(t.tweet_id)) flagged.insert(t.tweet_id);
        }
    }

    TrendDetection out;
    out.verdict = classify_trend(trend, flagged, deletions, config.thresholds, detector);
    out.attack_tweet_ids = flagged;

    std::vector<TrendTweet> attack_tweets;
    attack_tweets.reserve(flagged.size());
    for (const auto& t : tweets) {
        if (flagged.count(t.tweet_id)) attack_tweets.push_back(t);
    }
    out.events = extract_attack_events(trend, attack_tweets, deletions, config.gap_seconds);

    UtcSeconds decided = 0;
    for (const auto& t : tweets) decided = std::max(decided, t.created_at);
    for (TweetId id : flagged) {
        auto it = deletions.find(id);
        if (it != deletions.end()) decided = std::max(decided, it->second);
    }
    out.verdict.decided_at = decided;
    return out;
}

} // namespace detail

/// Classifies every trend with at least one mention. Per-trend work is
/// independent; with threads > 1 trends are processed in parallel and the
/// result order (sorted by trend name) is unchanged.
inline std::vector<TrendDetection> classify_all_trends(const StreamScan& scan, const ClassifierConfig& config) {
    std::vector<const std::pair<const std::string, std::vector<TrendTweet>>*> items;
    items.reserve(scan.trend_tweets.size());
    for (const auto& kv : scan.trend_tweets) items.push_back(&kv);

    std::vector<TrendDetection> results(items.size());
    const int threads = std::max(1, config.threads);
    if (threads == 1 || items.size() <= 1) {
        for (std::size_t i = 0; i < items.size(); ++i) {
            results[i] = detail::classify_one_trend(items[i]->first, items[i]->second, scan.deletions, config);
        }
        return results;
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= items.size()) break;
            results[i] = detail::classify_one_trend(items[i]->first, items[i]->second, scan.deletions, config);
        }
    };
    std::vector<std::thread> pool;
    const int n = std::min<int>(threads, static_cast<int>(items.size()));
    pool.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return results;
}

inline Json verdict_to_json(const TrendVerdict& v) {
    Json obj;
    obj["trend_name"] = v.trend_name;
    obj["attack_tweet_count"] = v.attack_tweet_count;
    obj["deleted_attack_count"] = v.deleted_attack_count;
    obj["deletion_ratio"] = v.deletion_ratio;
    obj["is_fake"] = v.is_fake;
    obj["detector"] = to_string(v.detector);
    obj["decided_at"] = format_iso8601(v.decided_at);
    return obj;
}

inline TrendVerdict verdict_from_json(const Json& obj) {
    TrendVerdict v;
    v.trend_name = obj.at("trend_name").get<std::string>();
    v.attack_tweet_count = obj.at("attack_tweet_count").get<std::int64_t>();
    v.deleted_attack_count = obj.at("deleted_attack_count").get<std::int64_t>();
    v.deletion_ratio = obj.at("deletion_ratio").get<double>();
    v.is_fake = obj.at("is_fake").get<bool>();
    v.detector = obj.at("detector").get<std::string>() == "isolation_forest" ? DetectorKind::isolation_forest
                                                                             : DetectorKind::lexicon;
    v.decided_at = parse_iso8601(obj.at("decided_at").get<std::string>()).value_or(0);
    return v;
}

inline Json attack_event_to_json(const AttackEvent& ev) {
    Json obj;
    obj["trend_name"] = ev.trend_name;
    obj["window_start"] = format_iso8601(ev.window_start);
    obj["window_end"] = format_iso8601(ev.window_end);
    obj["participant_ids"] = ev.participant_ids;
    obj["tweet_ids"] = ev.tweet_ids;
    obj["deleted_tweet_ids"] = ev.deleted_tweet_ids;
    return obj;
}

inline AttackEvent attack_event_from_json(const Json& obj) {
    AttackEvent ev;
    ev.trend_name = obj.at("trend_name").get<std::string>();
    ev.window_start = parse_iso8601(obj.at("window_start").get<std::string>()).value_or(0);
    ev.window_end = parse_iso8601(obj.at("window_end").get<std::string>()).value_or(0);
    for (const auto& v : obj.at("participant_ids")) ev.participant_ids.insert(v.get<AccountId>());
    for (const auto& v : obj.at("tweet_ids")) ev.tweet_ids.insert(v.get<TweetId>());
    for (const auto& v : obj.at("deleted_tweet_ids")) ev.deleted_tweet_ids.insert(v.get<TweetId>());
    return ev;
}

} // namespace astroturf
