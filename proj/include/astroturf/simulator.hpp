#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "astroturf/lexicon.hpp"
#include "astroturf/manifest.hpp"
#include "astroturf/rng.hpp"
#include "astroturf/stream.hpp"
#include "astroturf/trends.hpp"

namespace astroturf {

/// Seeded generator of synthetic attack scenarios with ground-truth labels.
///
/// The attack model: a set of bot accounts each posts one generated lexicon
/// tweet inside a short burst window, deletes it shortly after, and the
/// target keyword enters the trend list only once the tweets are already
/// gone. Organic trends carry background chatter that violates the lexicon
/// grammar; purges retire cohorts of bots and activate reserves.

struct AttackSpec {
    std::string trend_name;
    UtcSeconds start_at = 0;
    int bot_count = 0;
    int burst_seconds = 60;
    int delete_after_seconds = 300;
};

struct PurgeSpec {
    int month = 0;         // 1-based calendar month ordinal from sim start
    double fraction = 0.0; // share of the active roster retired at month end
};

struct SimConfig {
    UtcSeconds start_at = utc_from_civil(2022, 5, 17);
    int duration_days = 1;
    int bot_pool_size = 100;
    std::string lexicon_path;
    std::vector<AttackSpec> attacks;
    double organic_rate = 0.3; // background tweets per minute per trend
    int organic_trend_count = 0;
    double sample_rate = 1.0; // 1.0 = full stream, 0.01 = 1% mode
    std::vector<PurgeSpec> purge_schedule;
    std::uint64_t seed = 0;

    // Scenario shaping knobs, defaulted to the common case.
    double active_roster_fraction = 0.8;  // share of the pool used before purges
    double organic_deletion_rate = 0.02;  // organic tweets deleted later
    double organic_retweet_rate = 0.10;
    double clean_organic_rate = 0.03;     // organic tweets that pass the lexicon rules
    bool background_on_fake = true;       // organic mentions of fake trends after listing
    int snapshot_interval_minutes = 30;
    bool bot_profile_tweets = true;       // visible (undeleted) bot tweets
};

struct GroundTruthBot {
    UtcSeconds first_attack_at = 0;
    UtcSeconds last_attack_at = 0;
    std::int64_t attack_count = 0;
};

struct GroundTruth {
    std::set<TweetId> attack_tweet_ids;
    std::set<std::string> fake_trends;
    std::set<AccountId> bot_ids;
    std::map<AccountId, GroundTruthBot> per_bot;
    std::set<TweetId> tweet_universe; // every tweet id in the full scenario
};

class SimError : public std::runtime_error {
public:
    explicit SimError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Config and ground-truth serialization
// ---------------------------------------------------------------------------

inline Json sim_config_to_json(const SimConfig& c) {
    Json obj;
    obj["start_at"] = format_iso8601(c.start_at);
    obj["duration_days"] = c.duration_days;
    obj["bot_pool_size"] = c.bot_pool_size;
    obj["lexicon"] = c.lexicon_path;
    Json attacks = Json::array();
    for (const auto& a : c.attacks) {
        attacks.push_back(Json{{"trend_name", a.trend_name},
                               {"start_at", format_iso8601(a.start_at)},
                               {"bot_count", a.bot_count},
                               {"burst_seconds", a.burst_seconds},
                               {"delete_after_seconds", a.delete_after_seconds}});
    }
    obj["attacks"] = attacks;
    obj["organic_rate"] = c.organic_rate;
    obj["organic_trend_count"] = c.organic_trend_count;
    obj["sample_rate"] = c.sample_rate;
    Json purges = Json::array();
    for (const auto& p : c.purge_schedule) {
        purges.push_back(Json{{"month", p.month}, {"fraction", p.fraction}});
    }
    obj["purge_schedule"] = purges;
    obj["seed"] = c.seed;
    obj["active_roster_fraction"] = c.active_roster_fraction;
    obj["organic_deletion_rate"] = c.organic_deletion_rate;
    obj["organic_retweet_rate"] = c.organic_retweet_rate;
    obj["clean_organic_rate"] = c.clean_organic_rate;
    obj["background_on_fake"] = c.background_on_fake;
    obj["snapshot_interval_minutes"] = c.snapshot_interval_minutes;
    obj["bot_profile_tweets"] = c.bot_profile_tweets;
    return obj;
}

inline SimConfig sim_config_from_json(const Json& obj) {
    SimConfig c;
    auto time_field = [&](const char* key, UtcSeconds fallback) {
        if (!obj.contains(key)) return fallback;
        auto t = parse_iso8601(obj.at(key).get<std::string>());
        if (!t) throw SimError(std::string("config: '") + key + "' is not an ISO-8601 UTC timestamp");
        return *t;
    };
    c.start_at = time_field("start_at", c.start_at);
    c.duration_days = obj.value("duration_days", c.duration_days);
    c.bot_pool_size = obj.value("bot_pool_size", c.bot_pool_size);
    c.lexicon_path = obj.value("lexicon", std::string{});
    if (obj.contains("attacks")) {
        for (const auto& a : obj.at("attacks")) {
            AttackSpec spec;
            spec.trend_name = a.at("trend_name").get<std::string>();
            auto t = parse_iso8601(a.at("start_at").get<std::string>());
            if (!t) throw SimError("config: attack start_at is not an ISO-8601 UTC timestamp");
            spec.start_at = *t;
            spec.bot_count = a.at("bot_count").get<int>();
            spec.burst_seconds = a.value("burst_seconds", spec.burst_seconds);
            spec.delete_after_seconds = a.value("delete_after_seconds", spec.delete_after_seconds);
            c.attacks.push_back(std::move(spec));
        }
    }
    c.organic_rate = obj.value("organic_rate", c.organic_rate);
    c.organic_trend_count = obj.value("organic_trend_count", c.organic_trend_count);
    c.sample_rate = obj.value("sample_rate", c.sample_rate);
    if (obj.contains("purge_schedule")) {
        for (const auto& p : obj.at("purge_schedule")) {
            c.purge_schedule.push_back(PurgeSpec{p.at("month").get<int>(), p.at("fraction").get<double>()});
        }
    }
    c.seed = obj.value("seed", c.seed);
    c.active_roster_fraction = obj.value("active_roster_fraction", c.active_roster_fraction);
    c.organic_deletion_rate = obj.value("organic_deletion_rate", c.organic_deletion_rate);
    c.organic_retweet_rate = obj.value("organic_retweet_rate", c.organic_retweet_rate);
    c.clean_organic_rate = obj.value("clean_organic_rate", c.clean_organic_rate);
    c.background_on_fake = obj.value("background_on_fake", c.background_on_fake);
    c.snapshot_interval_minutes = obj.value("snapshot_interval_minutes", c.snapshot_interval_minutes);
    c.bot_profile_tweets = obj.value("bot_profile_tweets", c.bot_profile_tweets);
    return c;
}

inline Json ground_truth_to_json(const GroundTruth& gt) {
    Json obj;
    obj["attack_tweet_ids"] = gt.attack_tweet_ids;
    obj["fake_trends"] = gt.fake_trends;
    obj["bot_ids"] = gt.bot_ids;
    Json per_bot = Json::object();
    for (const auto& [id, b] : gt.per_bot) {
        per_bot[std::to_string(id)] = Json{{"first_attack_at", format_iso8601(b.first_attack_at)},
                                           {"last_attack_at", format_iso8601(b.last_attack_at)},
                                           {"attack_count", b.attack_count}};
    }
    obj["per_bot"] = per_bot;
    obj["tweet_universe"] = gt.tweet_universe;
    return obj;
}

inline GroundTruth ground_truth_from_json(const Json& obj) {
    GroundTruth gt;
    for (const auto& v : obj.at("attack_tweet_ids")) gt.attack_tweet_ids.insert(v.get<TweetId>());
    for (const auto& v : obj.at("fake_trends")) gt.fake_trends.insert(v.get<std::string>());
    for (const auto& v : obj.at("bot_ids")) gt.bot_ids.insert(v.get<AccountId>());
    for (const auto& [key, b] : obj.at("per_bot").items()) {
        GroundTruthBot bot;
        bot.first_attack_at = parse_iso8601(b.at("first_attack_at").get<std::string>()).value_or(0);
        bot.last_attack_at = parse_iso8601(b.at("last_attack_at").get<std::string>()).value_or(0);
        bot.attack_count = b.at("attack_count").get<std::int64_t>();
        gt.per_bot[std::stoll(key)] = bot;
    }
    for (const auto& v : obj.at("tweet_universe")) gt.tweet_universe.insert(v.get<TweetId>());
    return gt;
}

inline GroundTruth load_ground_truth(const std::filesystem::path& path) {
    return ground_truth_from_json(Json::parse(read_file(path)));
}

// ---------------------------------------------------------------------------
// Lexicon tweets
// ---------------------------------------------------------------------------

/// Loads one lexicon word per line, folds to lowercase, and keeps only words
/// the lexicon rules accept (letters and parentheses). Errors when the file
/// is missing or nothing survives.
inline std::vector<std::string> load_lexicon(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SimError("cannot open lexicon file: " + path);
    std::vector<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;
        std::string folded = fold_case(line);
        bool ok = true;
        size_t i = 0;
        while (i < folded.size()) {
            Codepoint cp = decode_utf8(folded, i);
            if (!is_alphabetic(cp) && cp != '(' && cp != ')') {
                ok = false;
                break;
            }
        }
        if (ok) words.push_back(std::move(folded));
    }
    if (words.empty()) throw SimError("lexicon file has no usable words: " + path);
    return words;
}

/// 2-9 random lowercase lexicon words with the target keyword appended. The
/// output always satisfies the lexicon rules once the mention is stripped,
/// so the first word must open with a letter rather than a parenthesis.
inline std::string generate_lexicon_tweet(Rng& rng, const std::vector<std::string>& lexicon,
                                          const std::string& trend_name) {
    if (lexicon.empty()) throw SimError("empty lexicon");
    auto starts_with_letter = [](const std::string& w) {
        size_t i = 0;
        return is_lower_letter(decode_utf8(w, i));
    };
    const int n = 2 + static_cast<int>(rng.below(8)); // 2..9
    std::string text;
    for (int i = 0; i < n; ++i) {
        std::string word = lexicon[rng.below(lexicon.size())];
        if (i == 0) {
            for (int tries = 0; tries < 64 && !starts_with_letter(word); ++tries) {
                word = lexicon[rng.below(lexicon.size())];
            }
            if (!starts_with_letter(word)) {
                auto it = std::find_if(lexicon.begin(), lexicon.end(), starts_with_letter);
                if (it == lexicon.end()) throw SimError("lexicon has no word starting with a letter");
                word = *it;
            }
        }
        if (i > 0) text.push_back(' ');
        text += word;
    }
    text.push_back(' ');
    text += trend_name;
    return text;
}

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

struct SimFiles {
    std::filesystem::path events;
    std::filesystem::path trends;
    std::filesystem::path statuses;
    std::filesystem::path ground_truth;
    std::filesystem::path config;
};

namespace detail {

struct SimAccount {
    AccountId id = 0;
    std::string handle;
    UtcSeconds created_at = 0;
};

inline const std::vector<std::string>& organic_name_words() {
    static const std::vector<std::string> words = {
        "Sabah", "Gece",  "Spor",   "Dizi",   "Haber", "Maç",  "Hava",
        "Deprem", "Müzik", "Sinema", "Okul",   "Tatil", "Final", "Konser"};
    return words;
}

inline std::string organic_trend_name(int i) {
    const auto& words = organic_name_words();
    return "#" + words[static_cast<size_t>(i) % words.size()] + "Gündemi" + std::to_string(i + 1);
}

/// Background text that nearly always violates at least one lexicon rule;
/// a small `clean_rate` share is indistinguishable from generated text, as
/// some real chatter is.
inline std::string organic_text(Rng& rng, const std::vector<std::string>& lexicon,
                                const std::string& trend_name, double clean_rate) {
    auto word = [&]() { return lexicon[rng.below(lexicon.size())]; };
    if (rng.chance(clean_rate)) {
        const int n = 2 + static_cast<int>(rng.below(5));
        std::string text;
        for (int i = 0; i < n; ++i) {
            if (i > 0) text.push_back(' ');
            text += word();
        }
        return text + " " + trend_name;
    }
    std::string text;
    switch (rng.below(6)) {
        case 0: text = "Bugün " + word() + " gündemde herkes konuşuyor"; break;
        case 1: text = word() + " hakkında ne düşünüyorsunuz?"; break;
        case 2: text = "şuna bakın https://t.co/x" + std::to_string(rng.below(100000)); break;
        case 3: text = "saat " + std::to_string(1 + rng.below(23)) + " itibariyle " + word() + " konuşuluyor"; break;
        case 4: {
            text = word();
            for (int i = 0; i < 11; ++i) text += " " + word();
            break;
        }
        default: text = "Inanılmaz!!! " + word() + " 😀"; break;
    }
    return text + " " + trend_name;
}

} // namespace detail

inline void validate_config(const SimConfig& c) {
    if (c.duration_days < 1) throw SimError("config: duration_days must be >= 1");
    if (c.bot_pool_size < 1) throw SimError("config: bot_pool_size must be >= 1");
    if (!(c.sample_rate > 0.0) || c.sample_rate > 1.0) throw SimError("config: sample_rate must lie in (0, 1]");
    if (c.organic_rate < 0.0) throw SimError("config: organic_rate must be >= 0");
    if (c.start_at % kSecondsPerDay != 0) throw SimError("config: start_at must be midnight-aligned UTC");
    const UtcSeconds end = c.start_at + static_cast<UtcSeconds>(c.duration_days) * kSecondsPerDay;
    for (const auto& a : c.attacks) {
        if (a.trend_name.empty()) throw SimError("config: attack trend_name is empty");
        if (a.bot_count < 1) throw SimError("config: attack bot_count must be >= 1");
        if (a.bot_count > c.bot_pool_size) {
            throw SimError("config: attack on '" + a.trend_name + "' wants " + std::to_string(a.bot_count) +
                           " bots but the pool has " + std::to_string(c.bot_pool_size));
        }
        if (a.burst_seconds < 1) throw SimError("config: burst_seconds must be >= 1");
        if (a.delete_after_seconds < 0) throw SimError("config: delete_after_seconds must be >= 0");
        if (a.start_at < c.start_at || a.start_at >= end) {
            throw SimError("config: attack on '" + a.trend_name + "' starts outside the simulated window");
        }
    }
    for (const auto& p : c.purge_schedule) {
        if (p.month < 1) throw SimError("config: purge month must be >= 1");
        if (p.fraction < 0.0 || p.fraction > 1.0) throw SimError("config: purge fraction must lie in [0, 1]");
    }
    // Attacked trends and generated organic trends must stay distinct, or
    // the timeline would list the same name twice in one snapshot.
    for (const auto& a : c.attacks) {
        for (int i = 0; i < c.organic_trend_count; ++i) {
            if (a.trend_name == detail::organic_trend_name(i)) {
                throw SimError("config: attack trend '" + a.trend_name + "' collides with an organic trend name");
            }
        }
    }
}

/// Generates the four scenario files (event stream, trend timeline, account
/// statuses, ground truth) plus an echo of the effective config. All
/// randomness derives from config.seed; equal configs give byte-identical
/// files.
inline SimFiles simulate(const SimConfig& config, const std::filesystem::path& out_dir) {
    validate_config(config);
    std::vector<std::string> lexicon = load_lexicon(config.lexicon_path);

    Rng root(config.seed);
    const UtcSeconds sim_end = config.start_at + static_cast<UtcSeconds>(config.duration_days) * kSecondsPerDay;

    // Accounts. Bots are created well before the simulated window so that
    // attacks never precede creation; reserves sit idle until a purge.
    std::vector<detail::SimAccount> bots(static_cast<size_t>(config.bot_pool_size));
    Rng acct_rng = root.fork(1);
    for (int i = 0; i < config.bot_pool_size; ++i) {
        detail::SimAccount& b = bots[static_cast<size_t>(i)];
        b.id = 1000000 + i;
        if (i % 40 < 3) { // unchanged platform-assigned handles, 8 digits
            b.handle = lexicon[acct_rng.below(lexicon.size())] + std::to_string(10000000 + i);
        } else {
            b.handle = lexicon[acct_rng.below(lexicon.size())] + "_" + std::to_string(i % 997);
        }
        b.created_at = config.start_at - static_cast<UtcSeconds>(30 + acct_rng.below(1065)) * kSecondsPerDay;
    }
    const int organic_users = std::max(50, config.bot_pool_size / 2);
    std::vector<detail::SimAccount> people(static_cast<size_t>(organic_users));
    for (int i = 0; i < organic_users; ++i) {
        detail::SimAccount& p = people[static_cast<size_t>(i)];
        p.id = 2000000 + i;
        p.handle = lexicon[acct_rng.below(lexicon.size())] + "_" + std::to_string(i);
        p.created_at = config.start_at - static_cast<UtcSeconds>(60 + acct_rng.below(2000)) * kSecondsPerDay;
    }

    // Active roster and purge bookkeeping.
    std::vector<int> roster, reserve;
    const int roster_size =
        std::max(1, static_cast<int>(static_cast<double>(config.bot_pool_size) * config.active_roster_fraction));
    for (int i = 0; i < config.bot_pool_size; ++i) {
        (i < roster_size ? roster : reserve).push_back(i);
    }
    std::map<AccountId, PlatformStatus> statuses;
    for (const auto& b : bots) statuses[b.id] = PlatformStatus::active;
    for (const auto& p : people) statuses[p.id] = PlatformStatus::active;

    std::vector<PurgeSpec> purges = config.purge_schedule;
    std::sort(purges.begin(), purges.end(), [](const PurgeSpec& a, const PurgeSpec& b) { return a.month < b.month; });
    std::size_t next_purge = 0;
    int retired_parity = 0;
    Rng purge_rng = root.fork(2);
    const std::int64_t start_month = month_index(config.start_at);
    auto apply_purges_before = [&](UtcSeconds t) {
        while (next_purge < purges.size() &&
               month_index(t) - start_month + 1 > purges[next_purge].month) {
            const auto& p = purges[next_purge];
            // Retire from the pre-purge roster first, then seat replacements,
            // so a fresh replacement can never be purged by the same wave.
            const int retire = static_cast<int>(static_cast<double>(roster.size()) * p.fraction);
            for (int k = 0; k < retire && !roster.empty(); ++k) {
                const std::size_t pick = purge_rng.below(roster.size());
                const int bot = roster[pick];
                roster.erase(roster.begin() + static_cast<std::ptrdiff_t>(pick));
                statuses[bots[static_cast<size_t>(bot)].id] =
                    (retired_parity++ % 2 == 0) ? PlatformStatus::suspended : PlatformStatus::not_found;
            }
            for (int k = 0; k < retire && !reserve.empty(); ++k) {
                roster.push_back(reserve.front());
                reserve.erase(reserve.begin());
            }
            ++next_purge;
        }
    };

    // Attacks, in time order.
    std::vector<AttackSpec> attacks = config.attacks;
    std::stable_sort(attacks.begin(), attacks.end(),
                     [](const AttackSpec& a, const AttackSpec& b) { return a.start_at < b.start_at; });

    std::vector<StreamEvent> events;
    GroundTruth truth;
    TweetId next_id = 1;
    std::map<int, std::pair<UtcSeconds, UtcSeconds>> bot_attack_span; // bot index -> first/last attack tweet
    std::map<int, std::int64_t> bot_attack_count;
    std::map<std::string, UtcSeconds> fake_listed_from; // trend -> burst end (listing eligibility)

    Rng attack_rng = root.fork(3);
    for (const auto& spec : attacks) {
        apply_purges_before(spec.start_at);
        if (static_cast<int>(roster.size()) < spec.bot_count) {
            throw SimError("config: attack on '" + spec.trend_name + "' wants " + std::to_string(spec.bot_count) +
                           " bots but only " + std::to_string(roster.size()) + " are active");
        }
        // Uniform sample of bot_count distinct roster members.
        std::vector<int> pick(roster);
        for (int k = 0; k < spec.bot_count; ++k) {
            const std::size_t j = static_cast<std::size_t>(k) + attack_rng.below(pick.size() - static_cast<std::size_t>(k));
            std::swap(pick[static_cast<size_t>(k)], pick[j]);
        }
        truth.fake_trends.insert(spec.trend_name);
        UtcSeconds burst_end = spec.start_at;
        for (int k = 0; k < spec.bot_count; ++k) {
            const int bot = pick[static_cast<size_t>(k)];
            const detail::SimAccount& acct = bots[static_cast<size_t>(bot)];
            const UtcSeconds at = spec.start_at + static_cast<UtcSeconds>(attack_rng.below(
                                                      static_cast<std::uint64_t>(spec.burst_seconds)));
            burst_end = std::max(burst_end, at);
            TweetRecord tweet;
            tweet.tweet_id = next_id++;
            tweet.author_id = acct.id;
            tweet.author_handle = acct.handle;
            tweet.created_at = at;
            tweet.account_created_at = acct.created_at;
            tweet.text = generate_lexicon_tweet(attack_rng, lexicon, spec.trend_name);
            tweet.is_retweet = false;
            events.push_back(tweet);
            events.push_back(DeletionNotice{tweet.tweet_id, acct.id, at + spec.delete_after_seconds});

            truth.attack_tweet_ids.insert(tweet.tweet_id);
            truth.bot_ids.insert(acct.id);
            truth.tweet_universe.insert(tweet.tweet_id);
            auto [it, inserted] = bot_attack_span.emplace(bot, std::make_pair(at, at));
            if (!inserted) {
                it->second.first = std::min(it->second.first, at);
                it->second.second = std::max(it->second.second, at);
            }
            bot_attack_count[bot] += 1;
        }
        auto [it, inserted] = fake_listed_from.emplace(spec.trend_name, burst_end);
        if (!inserted) it->second = std::min(it->second, burst_end);
    }
    apply_purges_before(sim_end + kSecondsPerDay); // purges after the last attack still set statuses

    for (const auto& [bot, span] : bot_attack_span) {
        GroundTruthBot gtb;
        gtb.first_attack_at = span.first;
        gtb.last_attack_at = span.second;
        gtb.attack_count = bot_attack_count[bot];
        truth.per_bot[bots[static_cast<size_t>(bot)].id] = gtb;
    }

    // Trend timeline: snapshots every interval; a fake trend is listed from
    // the first snapshot after its burst until the end of that day, newest
    // first; organic trends fill the ranks below in fixed order.
    std::vector<TrendSnapshot> snapshots;
    const std::int64_t interval = static_cast<std::int64_t>(config.snapshot_interval_minutes) * 60;
    for (int day = 0; day < config.duration_days; ++day) {
        const UtcSeconds day_start = config.start_at + static_cast<UtcSeconds>(day) * kSecondsPerDay;
        for (UtcSeconds at = day_start + interval; at < day_start + kSecondsPerDay; at += interval) {
            TrendSnapshot snap;
            snap.observed_at = at;
            std::vector<std::pair<UtcSeconds, std::string>> listed; // burst end desc = newest first
            for (const auto& [name, from] : fake_listed_from) {
                if (from >= day_start && from < day_start + kSecondsPerDay && from < at) {
                    listed.emplace_back(from, name);
                }
            }
            std::sort(listed.begin(), listed.end(), [](const auto& a, const auto& b) {
                return a.first != b.first ? a.first > b.first : a.second < b.second;
            });
            int rank = 1;
            for (const auto& [from, name] : listed) snap.entries.emplace_back(rank++, name);
            for (int i = 0; i < config.organic_trend_count; ++i) {
                snap.entries.emplace_back(rank++, detail::organic_trend_name(i));
            }
            if (!snap.entries.empty()) snapshots.push_back(std::move(snap));
        }
    }
    TrendTimeline timeline(std::move(snapshots));

    // Organic background: per-minute Bernoulli chatter on organic trends for
    // the whole window and on fake trends from listing to end of their day.
    auto emit_organic = [&](const std::string& trend, UtcSeconds from, UtcSeconds to, Rng& rng) {
        for (UtcSeconds minute = from - (from % kSecondsPerMinute); minute < to; minute += kSecondsPerMinute) {
            if (minute < from) continue;
            double expected = config.organic_rate;
            while (expected > 0.0) {
                const bool hit = expected >= 1.0 ? true : rng.chance(expected);
                expected -= 1.0;
                if (!hit) continue;
                const detail::SimAccount& who = people[rng.below(people.size())];
                std::string text = detail::organic_text(rng, lexicon, trend, config.clean_organic_rate);
                TweetRecord tweet;
                tweet.tweet_id = next_id++;
                tweet.author_id = who.id;
                tweet.author_handle = who.handle;
                tweet.created_at = minute + static_cast<UtcSeconds>(rng.below(60));
                tweet.account_created_at = who.created_at;
                if (rng.chance(config.organic_retweet_rate)) {
                    tweet.is_retweet = true;
                    tweet.text = "RT @" + people[rng.below(people.size())].handle + ": " + text;
                } else {
                    tweet.text = text;
                }
                events.push_back(tweet);
                truth.tweet_universe.insert(tweet.tweet_id);
                if (rng.chance(config.organic_deletion_rate)) {
                    const UtcSeconds del = tweet.created_at + 60 + static_cast<UtcSeconds>(rng.below(12 * 3600));
                    events.push_back(DeletionNotice{tweet.tweet_id, who.id, del});
                }
            }
        }
    };
    for (int i = 0; i < config.organic_trend_count; ++i) {
        Rng rng = root.fork(100 + static_cast<std::uint64_t>(i));
        emit_organic(detail::organic_trend_name(i), config.start_at, sim_end, rng);
    }
    if (config.background_on_fake) {
        for (const auto& [name, burst_end] : fake_listed_from) {
            Rng rng = root.fork(10000 + fnv1a(name));
            const UtcSeconds day_start = burst_end - (burst_end - config.start_at) % kSecondsPerDay;
            const UtcSeconds listing = day_start + ((burst_end - day_start) / interval + 1) * interval;
            emit_organic(name, listing, day_start + kSecondsPerDay, rng);
        }
    }

    // Visible profile tweets: planted so that many bots look silent long
    // before their last attack, some have nothing visible at all.
    if (config.bot_profile_tweets) {
        Rng rng = root.fork(4);
        for (const auto& [bot, span] : bot_attack_span) {
            const detail::SimAccount& acct = bots[static_cast<size_t>(bot)];
            const int visible = bot % 4; // 0..3 visible tweets
            const std::int64_t gap_months = bot % 28;
            UtcSeconds last_visible = span.second - gap_months * 30 * kSecondsPerDay;
            if (last_visible <= acct.created_at) last_visible = acct.created_at + kSecondsPerDay;
            for (int k = 0; k < visible; ++k) {
                TweetRecord tweet;
                tweet.tweet_id = next_id++;
                tweet.author_id = acct.id;
                tweet.author_handle = acct.handle;
                tweet.created_at = std::max(acct.created_at, last_visible - static_cast<UtcSeconds>(k) * 10 * kSecondsPerDay);
                tweet.account_created_at = acct.created_at;
                tweet.text = "arşiv notu " + std::to_string(rng.below(1000));
                tweet.is_retweet = false;
                events.push_back(tweet);
                truth.tweet_universe.insert(tweet.tweet_id);
            }
        }
    }

    // 1% mode: each tweet kept independently, a deletion kept iff its tweet
    // was. Ground truth keeps the full scenario.
    if (config.sample_rate < 1.0) {
        Rng rng = root.fork(5);
        std::set<TweetId> kept;
        std::vector<StreamEvent> sampled;
        std::stable_sort(events.begin(), events.end(), [](const StreamEvent& a, const StreamEvent& b) {
            return event_time(a) < event_time(b);
        });
        for (auto& ev : events) {
            if (const auto* t = std::get_if<TweetRecord>(&ev)) {
                if (rng.chance(config.sample_rate)) {
                    kept.insert(t->tweet_id);
                    sampled.push_back(std::move(ev));
                }
            } else if (kept.count(std::get<DeletionNotice>(ev).tweet_id)) {
                sampled.push_back(std::move(ev));
            }
        }
        events = std::move(sampled);
    }

    std::stable_sort(events.begin(), events.end(), [](const StreamEvent& a, const StreamEvent& b) {
        return event_time(a) < event_time(b);
    });

    // Outputs.
    std::filesystem::create_directories(out_dir);
    SimFiles files;
    files.events = out_dir / "events.ndjson";
    files.trends = out_dir / "trends.csv";
    files.statuses = out_dir / "statuses.csv";
    files.ground_truth = out_dir / "ground_truth.json";
    files.config = out_dir / "config.json";

    std::ostringstream events_out;
    for (const auto& ev : events) events_out << serialize_stream_event(ev) << '\n';
    write_file_atomic(files.events, events_out.str());

    std::ostringstream trends_out;
    write_trend_timeline(trends_out, timeline);
    write_file_atomic(files.trends, trends_out.str());

    std::map<AccountId, AccountStatus> status_rows;
    for (const auto& [id, st] : statuses) status_rows[id] = AccountStatus{id, st, sim_end};
    std::ostringstream status_out;
    write_account_statuses(status_out, status_rows);
    write_file_atomic(files.statuses, status_out.str());

    write_file_atomic(files.ground_truth, ground_truth_to_json(truth).dump(2) + "\n");
    write_file_atomic(files.config, sim_config_to_json(config).dump(2) + "\n");
    return files;
}

// ---------------------------------------------------------------------------
// Downsampler
// ---------------------------------------------------------------------------

/// Rewrites a stream file keeping each tweet independently with probability
/// `rate`; a deletion notice survives iff its tweet did. Line bytes and
/// ordering are preserved.
inline std::int64_t downsample_stream(const std::filesystem::path& in_path, const std::filesystem::path& out_path,
                                      double rate, std::uint64_t seed) {
    if (!(rate > 0.0) || rate > 1.0) throw SimError("sample rate must lie in (0, 1]");
    std::ifstream in(in_path);
    if (!in) throw SimError("cannot open stream file: " + in_path.string());
    Rng rng(seed);
    std::set<TweetId> kept;
    std::ostringstream out;
    std::string line;
    std::size_t line_no = 0;
    std::int64_t kept_tweets = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        StreamEvent ev = parse_stream_event(line, line_no);
        if (const auto* t = std::get_if<TweetRecord>(&ev)) {
            if (rng.chance(rate)) {
                kept.insert(t->tweet_id);
                ++kept_tweets;
                out << line << '\n';
            }
        } else if (kept.count(std::get<DeletionNotice>(ev).tweet_id)) {
            out << line << '\n';
        }
    }
    write_file_atomic(out_path, out.str());
    return kept_tweets;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

struct Metrics {
    // Conventions: precision is 1.0 on an empty prediction set, recall is
    // 0.0 on an empty truth set.
    double precision = 1.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::int64_t true_positives = 0;
    std::int64_t false_positives = 0;
    std::int64_t false_negatives = 0;
};

template <typename T>
Metrics evaluate_labels(const std::set<T>& predicted, const std::set<T>& truth) {
    Metrics m;
    for (const auto& p : predicted) {
        if (truth.count(p)) {
            ++m.true_positives;
        } else {
            ++m.false_positives;
        }
    }
    m.false_negatives = static_cast<std::int64_t>(truth.size()) - m.true_positives;
    m.precision = predicted.empty()
                      ? 1.0
                      : static_cast<double>(m.true_positives) / static_cast<double>(predicted.size());
    m.recall = truth.empty() ? 0.0 : static_cast<double>(m.true_positives) / static_cast<double>(truth.size());
    m.f1 = (m.precision + m.recall) > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    return m;
}

} // namespace astroturf
