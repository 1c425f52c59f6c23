#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "astroturf/rng.hpp"
#include "astroturf/stream.hpp"
#include "astroturf/trends.hpp"

using namespace astroturf;

namespace {

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
    auto path = std::filesystem::temp_directory_path() / ("astroturf_test_" + name);
    std::ofstream out(path, std::ios::trunc);
    out << content;
    return path;
}

} // namespace

TEST_CASE("parse tweet and deletion lines") {
    StreamEvent ev = parse_stream_event(
        R"({"type":"tweet","id":1,"author_id":7,"handle":"abc12345678","created_at":"2022-05-19T19:55:00Z","account_created_at":"2020-03-01T00:00:00Z","text":"merhaba dünya #X","is_retweet":false})");
    const auto& tweet = std::get<TweetRecord>(ev);
    CHECK(tweet.tweet_id == 1);
    CHECK(tweet.author_id == 7);
    CHECK(tweet.author_handle == "abc12345678");
    CHECK(tweet.created_at == utc_from_civil(2022, 5, 19, 19, 55, 0));
    CHECK(tweet.text == "merhaba dünya #X");
    CHECK(!tweet.is_retweet);

    StreamEvent del = parse_stream_event(
        R"({"type":"delete","tweet_id":1,"author_id":7,"deleted_at":"2022-05-19T19:59:00Z"})");
    const auto& notice = std::get<DeletionNotice>(del);
    CHECK(notice.tweet_id == 1);
    CHECK(notice.deleted_at == utc_from_civil(2022, 5, 19, 19, 59, 0));
}

TEST_CASE("parse errors carry line numbers and reasons") {
    CHECK_THROWS_AS(parse_stream_event(R"({"type":"tweet","id":2})", 17), StreamError);
    try {
        parse_stream_event(R"({"type":"tweet","id":2})", 17);
    } catch (const StreamError& e) {
        CHECK(e.line() == 17);
        CHECK(std::string(e.what()).find("17") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_stream_event(R"({"type":"poke","id":2})", 1), StreamError);
    CHECK_THROWS_AS(parse_stream_event("not json", 1), StreamError);
    CHECK_THROWS_AS(parse_stream_event(R"({"id":2})", 1), StreamError);
    // created before account existed
    CHECK_THROWS_AS(parse_stream_event(
                        R"({"type":"tweet","id":1,"author_id":7,"handle":"a","created_at":"2019-01-01T00:00:00Z","account_created_at":"2020-03-01T00:00:00Z","text":"x","is_retweet":false})"),
                    StreamError);
}

TEST_CASE("serialize then parse is identity") {
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        StreamEvent ev;
        const UtcSeconds base = utc_from_civil(2021, 1, 1) + static_cast<UtcSeconds>(rng.below(100000000));
        if (rng.chance(0.5)) {
            TweetRecord t;
            t.tweet_id = static_cast<TweetId>(rng.below(1000000));
            t.author_id = static_cast<AccountId>(rng.below(1000000));
            t.author_handle = "user_" + std::to_string(rng.below(100000));
            t.account_created_at = base - static_cast<UtcSeconds>(rng.below(10000000));
            t.created_at = base;
            t.text = rng.chance(0.3) ? "selam 😀 dünya #Gündem" : "sıradan bir akşam çayı";
            t.is_retweet = rng.chance(0.2);
            ev = t;
        } else {
            ev = DeletionNotice{static_cast<TweetId>(rng.below(1000000)), static_cast<AccountId>(rng.below(1000000)),
                                base};
        }
        StreamEvent back = parse_stream_event(serialize_stream_event(ev));
        CHECK(back == ev);
    }
}

TEST_CASE("stream reader reorders within the skew window") {
    std::ostringstream file;
    const UtcSeconds t0 = utc_from_civil(2022, 5, 19, 10, 0, 0);
    auto tweet_line = [&](TweetId id, UtcSeconds at) {
        TweetRecord t;
        t.tweet_id = id;
        t.author_id = 1;
        t.author_handle = "u";
        t.created_at = at;
        t.account_created_at = t0 - 1000000;
        t.text = "x";
        return serialize_stream_event(t);
    };
    file << tweet_line(1, t0 + 30) << "\n";
    file << tweet_line(2, t0) << "\n"; // 30s late, inside the window
    file << tweet_line(3, t0 + 45) << "\n";

    std::istringstream in(file.str());
    StreamReader reader(in);
    std::vector<TweetId> order;
    while (auto ev = reader.next()) order.push_back(std::get<TweetRecord>(*ev).tweet_id);
    CHECK(order == std::vector<TweetId>{2, 1, 3});
}

TEST_CASE("stream reader rejects events older than the skew window") {
    std::ostringstream file;
    const UtcSeconds t0 = utc_from_civil(2022, 5, 19, 10, 0, 0);
    auto tweet_line = [&](TweetId id, UtcSeconds at) {
        TweetRecord t;
        t.tweet_id = id;
        t.author_id = 1;
        t.author_handle = "u";
        t.created_at = at;
        t.account_created_at = t0 - 1000000;
        t.text = "x";
        return serialize_stream_event(t);
    };
    file << tweet_line(1, t0 + 120) << "\n";
    file << tweet_line(2, t0) << "\n"; // 120s late
    std::istringstream in(file.str());
    StreamReader reader(in);
    CHECK_THROWS_AS(
        [&] {
            while (reader.next()) {
            }
        }(),
        StreamError);
}

TEST_CASE("replaying the same file twice yields identical sequences") {
    std::ostringstream file;
    const UtcSeconds t = utc_from_civil(2022, 1, 1);
    for (int i = 0; i < 100; ++i) {
        TweetRecord rec;
        rec.tweet_id = i;
        rec.author_id = i % 7;
        rec.author_handle = "u";
        rec.created_at = t + (i % 3 == 0 ? -20 : 0) + i * 10; // mildly out of order
        rec.account_created_at = t - 100000;
        rec.text = "kayıt " + std::to_string(i);
        file << serialize_stream_event(rec) << "\n";
    }
    auto run = [&] {
        std::istringstream in(file.str());
        StreamReader reader(in);
        std::vector<std::string> out;
        while (auto ev = reader.next()) out.push_back(serialize_stream_event(*ev));
        return out;
    };
    CHECK(run() == run());
}

TEST_CASE("any stream shuffled within the skew window replays sorted") {
    Rng rng(404);
    for (int round = 0; round < 20; ++round) {
        const UtcSeconds t0 = utc_from_civil(2022, 5, 1);
        std::vector<StreamEvent> events;
        UtcSeconds t = t0;
        for (int i = 0; i < 150; ++i) {
            t += static_cast<UtcSeconds>(rng.below(40));
            TweetRecord rec;
            rec.tweet_id = i;
            rec.author_id = 1;
            rec.author_handle = "u";
            // Jitter each event backward by up to the skew window.
            rec.created_at = t - static_cast<UtcSeconds>(rng.below(StreamReader::kSkewSeconds));
            rec.account_created_at = t0 - 86400;
            rec.text = "x";
            events.push_back(rec);
        }
        // The file is ordered by the jitter-free times; jitter only moves
        // events earlier, so no event is ever later than the watermark.
        std::ostringstream file;
        for (const auto& ev : events) file << serialize_stream_event(ev) << "\n";
        std::istringstream in(file.str());
        StreamReader reader(in);
        UtcSeconds prev = std::numeric_limits<UtcSeconds>::min();
        std::size_t count = 0;
        while (auto ev = reader.next()) {
            CHECK(event_time(*ev) >= prev);
            prev = event_time(*ev);
            ++count;
        }
        CHECK(count == events.size());
    }
}

TEST_CASE("trend timeline loading") {
    auto path = temp_file("trends_ok.csv",
                          "observed_at,rank,trend_name\n"
                          "2022-05-19T10:00:00Z,1,#Bir\n"
                          "2022-05-19T10:00:00Z,2,#İki\n"
                          "2022-05-19T10:00:00Z,3,#Üç\n"
                          "2022-05-19T10:00:00Z,4,#Dört\n"
                          "2022-05-19T10:00:00Z,5,#Beş\n"
                          "2022-05-19T12:00:00Z,1,#Altı\n");
    TrendTimeline timeline = load_trend_timeline(path.string());
    REQUIRE(timeline.snapshots().size() == 2);
    CHECK(timeline.snapshots()[0].entries.size() == 5);

    // Step-function lookup between snapshots returns the earlier snapshot.
    const TrendSnapshot* snap = timeline.snapshot_at(utc_from_civil(2022, 5, 19, 11, 0, 0));
    REQUIRE(snap != nullptr);
    CHECK(snap->observed_at == utc_from_civil(2022, 5, 19, 10, 0, 0));
    CHECK(timeline.snapshot_at(utc_from_civil(2022, 5, 19, 9, 0, 0)) == nullptr);
}

TEST_CASE("trend timeline rejects malformed files") {
    auto dup = temp_file("trends_dup.csv",
                         "observed_at,rank,trend_name\n"
                         "2022-05-19T10:00:00Z,1,#Bir\n"
                         "2022-05-19T10:00:00Z,1,#İki\n");
    CHECK_THROWS_AS(load_trend_timeline(dup.string()), StreamError);

    auto gap = temp_file("trends_gap.csv",
                         "observed_at,rank,trend_name\n"
                         "2022-05-19T10:00:00Z,2,#Bir\n");
    CHECK_THROWS_AS(load_trend_timeline(gap.string()), StreamError);

    auto dupname = temp_file("trends_dupname.csv",
                             "observed_at,rank,trend_name\n"
                             "2022-05-19T10:00:00Z,1,#Bir\n"
                             "2022-05-19T10:00:00Z,2,#Bir\n");
    CHECK_THROWS_AS(load_trend_timeline(dupname.string()), StreamError);

    auto badrow = temp_file("trends_badrow.csv",
                            "observed_at,rank,trend_name\n"
                            "not-a-time,1,#Bir\n");
    CHECK_THROWS_AS(load_trend_timeline(badrow.string()), StreamError);
}

TEST_CASE("empty timeline yields no active trends") {
    auto path = temp_file("trends_empty.csv", "observed_at,rank,trend_name\n");
    TrendTimeline timeline = load_trend_timeline(path.string());
    CHECK(timeline.empty());
    CHECK(timeline.trends_active_at(utc_from_civil(2022, 1, 1), 24 * 3600).empty());
}

TEST_CASE("trends_active_at horizons") {
    std::vector<TrendSnapshot> snaps;
    const UtcSeconds listing = utc_from_civil(2022, 5, 19, 20, 0, 0);
    snaps.push_back(TrendSnapshot{listing, {{1, "#Yeni"}}});
    TrendTimeline timeline(std::move(snaps));

    // Exactly at the snapshot, zero horizon.
    CHECK(timeline.trends_active_at(listing, 0) == std::set<std::string>{"#Yeni"});
    // One minute before first listing with a 24h horizon: attack tweets
    // precede the listing and must still match.
    CHECK(timeline.trends_active_at(listing - 60, 24 * 3600) == std::set<std::string>{"#Yeni"});
    CHECK(timeline.trends_active_at(listing - 60, 0).empty());
}

TEST_CASE("trends_active_at is monotone in the horizon") {
    std::vector<TrendSnapshot> snaps;
    for (int h = 0; h < 40; ++h) {
        snaps.push_back(TrendSnapshot{utc_from_civil(2022, 5, 19) + h * 1800, {{1, "#T" + std::to_string(h)}}});
    }
    TrendTimeline timeline(std::move(snaps));
    Rng rng(5);
    for (int i = 0; i < 50; ++i) {
        const UtcSeconds t = utc_from_civil(2022, 5, 19) + static_cast<UtcSeconds>(rng.below(86400));
        const std::int64_t h1 = static_cast<std::int64_t>(rng.below(40000));
        const std::int64_t h2 = h1 + static_cast<std::int64_t>(rng.below(40000));
        auto small = timeline.trends_active_at(t, h1);
        auto large = timeline.trends_active_at(t, h2);
        CHECK(std::includes(large.begin(), large.end(), small.begin(), small.end()));
    }
}

TEST_CASE("trend mention extraction") {
    std::set<std::string> candidates{"ElonMusk TvitterıMafetti", "#FakeTrend"};
    CHECK(extract_trend_mentions("ElonMusk TvitterıMafetti rocks", candidates) ==
          std::vector<std::string>{"ElonMusk TvitterıMafetti"});
    CHECK(extract_trend_mentions("hello #FakeTrend", candidates) == std::vector<std::string>{"#FakeTrend"});
    CHECK(extract_trend_mentions("hiçbir şey yok", candidates).empty());
    CHECK(extract_trend_mentions("elonmusk tvitterımafetti lowercased", candidates) ==
          std::vector<std::string>{"ElonMusk TvitterıMafetti"});
    // Hashtags match whole tokens only.
    CHECK(extract_trend_mentions("hello #FakeTrendX", candidates).empty());
    CHECK(extract_trend_mentions("anything", {}).empty());
}

TEST_CASE("account status file round trip and validation") {
    auto path = temp_file("status_ok.csv",
                          "account_id,status,checked_at\n"
                          "10,active,2023-02-01T00:00:00Z\n"
                          "11,suspended,2023-02-01T00:00:00Z\n"
                          "12,not_found,2023-02-01T00:00:00Z\n");
    auto statuses = load_account_statuses(path.string());
    REQUIRE(statuses.size() == 3);
    CHECK(statuses.at(11).status == PlatformStatus::suspended);

    std::ostringstream out;
    write_account_statuses(out, statuses);
    auto again = temp_file("status_round.csv", out.str());
    CHECK(load_account_statuses(again.string()).size() == 3);

    auto dup = temp_file("status_dup.csv",
                         "account_id,status,checked_at\n"
                         "10,active,2023-02-01T00:00:00Z\n"
                         "10,suspended,2023-02-01T00:00:00Z\n");
    CHECK_THROWS_AS(load_account_statuses(dup.string()), StreamError);

    auto bad = temp_file("status_bad.csv",
                         "account_id,status,checked_at\n"
                         "10,vanished,2023-02-01T00:00:00Z\n");
    CHECK_THROWS_AS(load_account_statuses(bad.string()), StreamError);
}
