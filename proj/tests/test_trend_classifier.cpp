#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "astroturf/driver.hpp"
#include "astroturf/fixtures.hpp"
#include "astroturf/trend_classifier.hpp"

using namespace astroturf;

namespace {

const std::string kLexiconPath = std::string(ASTROTURF_DATA_DIR) + "/lexicon_tr.txt";

std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("astroturf_tc_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

TweetRecord make_tweet(TweetId id, AccountId author, UtcSeconds at, const std::string& text) {
    TweetRecord t;
    t.tweet_id = id;
    t.author_id = author;
    t.author_handle = "u" + std::to_string(author);
    t.created_at = at;
    t.account_created_at = at - 86400 * 400;
    t.text = text;
    return t;
}

} // namespace

TEST_CASE("deletion index keeps the last notice and orphan notices") {
    const UtcSeconds t0 = utc_from_civil(2022, 5, 19, 19, 55, 0);
    std::vector<StreamEvent> events;
    events.push_back(make_tweet(1, 7, t0, "x"));
    events.push_back(DeletionNotice{1, 7, t0 + 240});
    events.push_back(DeletionNotice{99, 8, t0 + 300}); // no matching tweet in stream
    auto index = build_deletion_index(events);
    CHECK(index.size() == 2);
    CHECK(index.at(1) == t0 + 240);
    CHECK(index.count(99) == 1);
}

TEST_CASE("a mass deletion minute indexes every notice") {
    // 1666 deletions within the same minute.
    const UtcSeconds t0 = utc_from_civil(2022, 5, 19, 19, 59, 0);
    std::vector<StreamEvent> events;
    for (int i = 0; i < 1666; ++i) events.push_back(DeletionNotice{i, i, t0 + i % 60});
    CHECK(build_deletion_index(events).size() == 1666);
}

TEST_CASE("fake-trend decision tree thresholds") {
    CHECK(!passes_fake_trend_rules(3, 1.0));
    CHECK(passes_fake_trend_rules(4, 0.75));
    CHECK(!passes_fake_trend_rules(20, 0.45));
    CHECK(passes_fake_trend_rules(20, 0.451));
    CHECK(!passes_fake_trend_rules(0, 0.0));

    // Monotone in the count once the ratio clears the bar.
    for (int count = 4; count < 40; ++count) CHECK(passes_fake_trend_rules(count, 0.5));
    for (int count = 0; count < 4; ++count) CHECK(!passes_fake_trend_rules(count, 1.0));
}

TEST_CASE("classify_trend counts deletions and applies the rules") {
    const UtcSeconds t0 = utc_from_civil(2022, 5, 19, 19, 55, 0);
    DeletionIndex deletions{{1, t0 + 100}, {2, t0 + 101}, {3, t0 + 102}};

    auto v = classify_trend("#T", {1, 2, 3, 4}, deletions);
    CHECK(v.attack_tweet_count == 4);
    CHECK(v.deleted_attack_count == 3);
    CHECK(v.deletion_ratio == doctest::Approx(0.75));
    CHECK(v.is_fake);

    CHECK(!classify_trend("#T", {1, 2, 3}, deletions).is_fake);

    // Exactly 45% deleted: 9 of 20, strict inequality fails.
    DeletionIndex nine;
    for (TweetId id = 1; id <= 9; ++id) nine[id] = t0;
    std::set<TweetId> twenty;
    for (TweetId id = 1; id <= 20; ++id) twenty.insert(id);
    auto boundary = classify_trend("#T", twenty, nine);
    CHECK(boundary.deletion_ratio == doctest::Approx(0.45));
    CHECK(!boundary.is_fake);

    // Flipping one deletion across the boundary flips the verdict.
    nine[10] = t0;
    CHECK(classify_trend("#T", twenty, nine).is_fake);

    auto empty = classify_trend("#T", {}, deletions);
    CHECK(empty.attack_tweet_count == 0);
    CHECK(empty.deletion_ratio == 0.0);
    CHECK(!empty.is_fake);
}

TEST_CASE("attack events merge on the gap and partition the tweets") {
    const UtcSeconds t0 = utc_from_civil(2022, 5, 19, 20, 0, 0);
    DeletionIndex deletions;
    std::vector<TrendTweet> tweets;
    for (int i = 0; i < 200; ++i) {
        tweets.push_back(TrendTweet{i, 1000 + i, t0 + i % 60, true});
        deletions[i] = t0 + 300;
    }
    std::sort(tweets.begin(), tweets.end(), [](auto& a, auto& b) { return a.created_at < b.created_at; });
    auto events = extract_attack_events("#T", tweets, deletions);
    REQUIRE(events.size() == 1);
    CHECK(events[0].participant_ids.size() == 200);
    CHECK(events[0].tweet_ids.size() == 200);
    CHECK(events[0].deleted_tweet_ids.size() == 200);
    CHECK(events[0].window_end >= events[0].window_start);

    // Two bursts three hours apart are two events.
    std::vector<TrendTweet> two;
    for (int i = 0; i < 5; ++i) two.push_back(TrendTweet{i, i, t0 + i, true});
    for (int i = 0; i < 5; ++i) two.push_back(TrendTweet{50 + i, 50 + i, t0 + 3 * 3600 + i, true});
    auto split = extract_attack_events("#T", two, deletions);
    REQUIRE(split.size() == 2);
    CHECK(split[0].tweet_ids.size() == 5);
    CHECK(split[1].tweet_ids.size() == 5);

    // Every attack tweet lands in exactly one event.
    std::set<TweetId> seen;
    for (const auto& ev : split) {
        for (TweetId id : ev.tweet_ids) CHECK(seen.insert(id).second);
    }
    CHECK(seen.size() == 10);

    // A single tweet is a single one-participant event.
    auto solo = extract_attack_events("#T", {TrendTweet{9, 9, t0, true}}, deletions);
    REQUIRE(solo.size() == 1);
    CHECK(solo[0].participant_ids.size() == 1);
    CHECK(solo[0].window_start == solo[0].window_end);
}

TEST_CASE("classify_all_trends on an empty stream") {
    StreamScan scan;
    ClassifierConfig config;
    CHECK(classify_all_trends(scan, config).empty());
}

TEST_CASE("sample mode counts only deleted lexicon tweets") {
    const UtcSeconds t0 = utc_from_civil(2022, 5, 19, 12, 0, 0);
    StreamScan scan;
    auto& tweets = scan.trend_tweets["#T"];
    // 5 deleted lexicon tweets, 2 undeleted lexicon tweets, 3 deleted
    // non-lexicon tweets.
    for (int i = 0; i < 5; ++i) {
        tweets.push_back(TrendTweet{i, 100 + i, t0 + i, true});
        scan.deletions[i] = t0 + 120;
    }
    for (int i = 5; i < 7; ++i) tweets.push_back(TrendTweet{i, 100 + i, t0 + i, true});
    for (int i = 7; i < 10; ++i) {
        tweets.push_back(TrendTweet{i, 100 + i, t0 + i, false});
        scan.deletions[i] = t0 + 120;
    }

    ClassifierConfig config;
    config.mode = DetectionMode::sample_1pct;
    auto results = classify_all_trends(scan, config);
    REQUIRE(results.size() == 1);
    const auto& r = results[0];
    CHECK(r.verdict.detector == DetectorKind::lexicon);
    CHECK(r.verdict.attack_tweet_count == 5);
    CHECK(r.verdict.deleted_attack_count == 5);
    CHECK(r.verdict.is_fake);
    CHECK(r.attack_tweet_ids == std::set<TweetId>{0, 1, 2, 3, 4});
    CHECK(r.verdict.decided_at == t0 + 120);
}

TEST_CASE("full mode uses the forest on burst trends and falls back when degenerate") {
    const UtcSeconds t0 = utc_from_civil(2022, 5, 19, 8, 0, 0);
    StreamScan scan;
    // Trend A: 150-tweet burst plus sparse background, forest path.
    auto& a = scan.trend_tweets["#A"];
    TweetId next = 1;
    for (int i = 0; i < 50; ++i) a.push_back(TrendTweet{next++, 5000 + i, t0 + i * 600, false});
    const UtcSeconds burst_at = t0 + 50 * 600 + 3600;
    std::set<TweetId> burst;
    for (int i = 0; i < 150; ++i) {
        burst.insert(next);
        scan.deletions[next] = burst_at + 400;
        a.push_back(TrendTweet{next++, 7000 + i, burst_at + i * 60 / 150, true});
    }
    // Trend B: a single three-tweet minute, too few windows; lexicon fallback.
    auto& b = scan.trend_tweets["#B"];
    for (int i = 0; i < 3; ++i) {
        b.push_back(TrendTweet{next, 9000 + i, t0 + i, true});
        scan.deletions[next++] = t0 + 200;
    }

    ClassifierConfig config;
    config.mode = DetectionMode::full;
    config.forest.outlier_factor = 0.01; // 51 windows -> budget 1
    config.forest.seed = 99;
    auto results = classify_all_trends(scan, config);
    REQUIRE(results.size() == 2);

    const auto& ra = results[0];
    CHECK(ra.verdict.trend_name == "#A");
    CHECK(ra.verdict.detector == DetectorKind::isolation_forest);
    CHECK(ra.attack_tweet_ids == burst);
    CHECK(ra.verdict.is_fake);
    REQUIRE(ra.events.size() == 1);
    CHECK(ra.events[0].tweet_ids == burst);

    const auto& rb = results[1];
    CHECK(rb.verdict.trend_name == "#B");
    CHECK(rb.verdict.detector == DetectorKind::lexicon);
    CHECK(rb.verdict.attack_tweet_count == 3);
    CHECK(!rb.verdict.is_fake); // below the 4-tweet rule
}

TEST_CASE("threaded classification matches single-threaded results") {
    const UtcSeconds t0 = utc_from_civil(2022, 5, 19, 8, 0, 0);
    StreamScan scan;
    TweetId next = 1;
    for (int trend = 0; trend < 12; ++trend) {
        auto& tweets = scan.trend_tweets["#T" + std::to_string(trend)];
        for (int i = 0; i < 40; ++i) tweets.push_back(TrendTweet{next++, 100 + i, t0 + i * 300, false});
        for (int i = 0; i < 50 + trend; ++i) {
            scan.deletions[next] = t0 + 90000;
            tweets.push_back(TrendTweet{next++, 900 + i, t0 + 40 * 300 + 60 + i * 60 / (50 + trend), true});
        }
    }
    ClassifierConfig one;
    one.mode = DetectionMode::full;
    one.forest.seed = 4;
    ClassifierConfig four = one;
    four.threads = 4;
    auto rs1 = classify_all_trends(scan, one);
    auto rs4 = classify_all_trends(scan, four);
    REQUIRE(rs1.size() == rs4.size());
    for (std::size_t i = 0; i < rs1.size(); ++i) {
        CHECK(rs1[i].verdict.trend_name == rs4[i].verdict.trend_name);
        CHECK(rs1[i].verdict.is_fake == rs4[i].verdict.is_fake);
        CHECK(rs1[i].attack_tweet_ids == rs4[i].attack_tweet_ids);
    }
}

TEST_CASE("1% sample scenario labels only the attacked trend fake") {
    auto dir = temp_dir("bignet");
    SimConfig config = presets::bignet_sampled(2024, kLexiconPath);
    SimFiles files = simulate(config, dir);

    DetectOptions opt;
    opt.stream_path = files.events;
    opt.trends_path = files.trends;
    opt.statuses_path = files.statuses;
    opt.classifier.mode = DetectionMode::sample_1pct;
    DetectArtifacts art = detect_in_memory(opt);

    GroundTruth truth = load_ground_truth(files.ground_truth);
    CHECK(art.fake_trends == truth.fake_trends);
    for (const auto& d : art.detections) {
        CHECK(d.verdict.detector == DetectorKind::lexicon);
        if (!truth.fake_trends.count(d.verdict.trend_name)) CHECK(!d.verdict.is_fake);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("verdict and attack event json round trips") {
    TrendVerdict v;
    v.trend_name = "#T";
    v.attack_tweet_count = 10;
    v.deleted_attack_count = 9;
    v.deletion_ratio = 0.9;
    v.is_fake = true;
    v.detector = DetectorKind::isolation_forest;
    v.decided_at = utc_from_civil(2022, 5, 19, 20, 0, 0);
    TrendVerdict back = verdict_from_json(verdict_to_json(v));
    CHECK(back.trend_name == v.trend_name);
    CHECK(back.attack_tweet_count == v.attack_tweet_count);
    CHECK(back.deletion_ratio == doctest::Approx(v.deletion_ratio));
    CHECK(back.is_fake == v.is_fake);
    CHECK(back.detector == v.detector);
    CHECK(back.decided_at == v.decided_at);

    AttackEvent ev;
    ev.trend_name = "#T";
    ev.window_start = v.decided_at;
    ev.window_end = v.decided_at + 59;
    ev.participant_ids = {1, 2, 3};
    ev.tweet_ids = {10, 11, 12};
    ev.deleted_tweet_ids = {10, 11};
    AttackEvent back_ev = attack_event_from_json(attack_event_to_json(ev));
    CHECK(back_ev.participant_ids == ev.participant_ids);
    CHECK(back_ev.tweet_ids == ev.tweet_ids);
    CHECK(back_ev.deleted_tweet_ids == ev.deleted_tweet_ids);
}
