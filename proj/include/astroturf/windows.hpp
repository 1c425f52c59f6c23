#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "astroturf/isolation_forest.hpp"
#include "astroturf/stream.hpp"
#include "astroturf/time.hpp"

namespace astroturf {

struct MinuteWindow {
    UtcSeconds window_start = 0; // truncated to the minute
    std::vector<TweetId> tweet_ids;

    std::int64_t count() const { return static_cast<std::int64_t>(tweet_ids.size()); }
};

struct WindowVerdict {
    MinuteWindow window;
    double anomaly_score = 0.0;
    bool is_anomalous = false;
};

/// Attack bursts land inside a single minute, so volume is aggregated per
/// occupied minute. Empty minutes between tweets are not materialized.
inline std::vector<MinuteWindow> group_minute_windows(const std::vector<std::pair<TweetId, UtcSeconds>>& tweets) {
    std::vector<MinuteWindow> windows;
    UtcSeconds prev = std::numeric_limits<UtcSeconds>::min();
    for (const auto& [id, created_at] : tweets) {
        if (created_at < prev) throw std::invalid_argument("group_minute_windows requires time-sorted input");
        prev = created_at;
        const UtcSeconds minute = truncate_to_minute(created_at);
        if (windows.empty() || windows.back().window_start != minute) {
            windows.push_back(MinuteWindow{minute, {}});
        }
        windows.back().tweet_ids.push_back(id);
    }
    return windows;
}

/// Fewer occupied windows than this cannot support a meaningful forest; such
/// trends yield no anomalies and fall back to the lexicon path.
constexpr std::size_t kMinWindowsForForest = 4;

/// Scores every occupied window and marks the top ceil(outlier_factor * n)
/// scores anomalous, ties broken by larger count then earlier window start.
/// Degenerate input (all counts equal, or fewer than 4 windows) yields no
/// anomalies.
inline std::vector<WindowVerdict> detect_anomalous_windows(const std::vector<MinuteWindow>& windows,
                                                           const ForestParams& params) {
    std::vector<WindowVerdict> verdicts;
    verdicts.reserve(windows.size());
    for (const auto& w : windows) verdicts.push_back(WindowVerdict{w, 0.0, false});
    if (windows.size() < kMinWindowsForForest) return verdicts;

    std::vector<double> counts;
    counts.reserve(windows.size());
    for (const auto& w : windows) counts.push_back(static_cast<double>(w.count()));

    auto forest = IsolationForest::fit(counts, params);
    if (!forest) return verdicts; // all counts equal

    for (auto& v : verdicts) v.anomaly_score = forest->score(static_cast<double>(v.window.count()));

    const auto budget = static_cast<std::size_t>(
        std::ceil(params.outlier_factor * static_cast<double>(windows.size())));
    std::vector<std::size_t> order(verdicts.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (verdicts[a].anomaly_score != verdicts[b].anomaly_score) {
            return verdicts[a].anomaly_score > verdicts[b].anomaly_score;
        }
        if (verdicts[a].window.count() != verdicts[b].window.count()) {
            return verdicts[a].window.count() > verdicts[b].window.count();
        }
        return verdicts[a].window.window_start < verdicts[b].window.window_start;
    });
    for (std::size_t i = 0; i < budget && i < order.size(); ++i) verdicts[order[i]].is_anomalous = true;
    return verdicts;
}

/// Tweet ids inside anomalous windows of one trend's mention stream.
inline std::set<TweetId> flag_attack_tweets(const std::vector<std::pair<TweetId, UtcSeconds>>& trend_stream,
                                            const ForestParams& params) {
    std::set<TweetId> flagged;
    for (const auto& v : detect_anomalous_windows(group_minute_windows(trend_stream), params)) {
        if (v.is_anomalous) flagged.insert(v.window.tweet_ids.begin(), v.window.tweet_ids.end());
    }
    return flagged;
}

} // namespace astroturf
