#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "astroturf/bot_ledger.hpp"
#include "astroturf/trend_classifier.hpp"
#include "astroturf/trends.hpp"

namespace astroturf {

/// Aggregates behind the report figures: prevalence of fake trends in the
/// daily top 5, bot lifecycle histograms, and per-account characteristics.

struct AttackBucketStat {
    std::int64_t total = 0;
    std::int64_t still_active = 0;
};

struct ReportBundle {
    std::map<std::string, double> daily_fake_share;               // day -> share of fakes in the top-5 set
    std::map<std::string, std::int64_t> monthly_first_attack;     // month -> accounts first seen attacking
    std::map<std::string, std::int64_t> monthly_last_attack;      // month -> accounts last seen attacking
    std::map<std::string, std::int64_t> monthly_creation;         // month -> creations, still-active accounts only
    std::map<std::string, std::int64_t> first_last_quarter_matrix; // "Qfirst/Qlast" -> accounts
    std::map<std::string, std::int64_t> time_to_first_attack_bins; // 3-month bin -> accounts
    std::map<std::string, AttackBucketStat> attacks_histogram;    // "1".."9","10+" -> (total, still active)
    std::map<std::string, std::int64_t> undeleted_histogram;      // log buckets -> accounts
    std::map<std::string, std::int64_t> silent_gap_histogram;     // months "0".."24","25+","no visible tweets"
    double default_handle_share = 0.0;
};

/// Share of fake trends among the distinct names that held rank 1..5 in any
/// snapshot of each day. Days without snapshots are omitted.
inline std::map<std::string, double> daily_fake_share_top5(const TrendTimeline& timeline,
                                                           const std::vector<TrendVerdict>& verdicts) {
    std::set<std::string> fake;
    for (const auto& v : verdicts) {
        if (v.is_fake) fake.insert(v.trend_name);
    }
    std::map<std::string, std::set<std::string>> day_sets;
    for (const auto& snap : timeline.snapshots()) {
        auto& names = day_sets[day_key(snap.observed_at)];
        for (const auto& [rank, name] : snap.entries) {
            if (rank <= 5) names.insert(name);
        }
    }
    std::map<std::string, double> shares;
    for (const auto& [day, names] : day_sets) {
        if (names.empty()) continue;
        std::int64_t fakes = 0;
        for (const auto& n : names) {
            if (fake.count(n)) ++fakes;
        }
        shares[day] = static_cast<double>(fakes) / static_cast<double>(names.size());
    }
    return shares;
}

inline std::string attack_bucket(std::int64_t attack_count) {
    return attack_count >= 10 ? "10+" : std::to_string(attack_count);
}

inline std::string undeleted_bucket(std::int64_t n) {
    if (n <= 0) return "0";
    if (n < 10) return "1-9";
    if (n < 100) return "10-99";
    if (n < 1000) return "100-999";
    return "1000+";
}

inline std::string silent_gap_bucket(const BotRecord& r) {
    if (!r.silent_gap_months) return "no visible tweets";
    const std::int64_t m = *r.silent_gap_months;
    return m >= 25 ? "25+" : std::to_string(m);
}

/// 3-month bins over the time between account creation and first attack,
/// keyed by the bin's start month ("0-2", "3-5", ..., "36+").
inline std::string time_to_first_attack_bin(const BotRecord& r) {
    const std::int64_t months = std::max<std::int64_t>(0, months_between(r.account_created_at, r.first_attack_at));
    if (months >= 36) return "36+";
    const std::int64_t lo = months / 3 * 3;
    return std::to_string(lo) + "-" + std::to_string(lo + 2);
}

struct LifecycleHistograms {
    std::map<std::string, std::int64_t> monthly_first_attack;
    std::map<std::string, std::int64_t> monthly_last_attack;
    std::map<std::string, std::int64_t> monthly_creation; // still-active accounts only
    std::map<std::string, std::int64_t> first_last_quarter_matrix;
};

inline LifecycleHistograms lifecycle_histograms(const std::vector<BotRecord>& ledger) {
    LifecycleHistograms h;
    for (const auto& r : ledger) {
        h.monthly_first_attack[month_key(r.first_attack_at)] += 1;
        h.monthly_last_attack[month_key(r.last_attack_at)] += 1;
        if (r.status == PlatformStatus::active) {
            h.monthly_creation[month_key(r.account_created_at)] += 1;
        }
        h.first_last_quarter_matrix[quarter_key(r.first_attack_at) + "/" + quarter_key(r.last_attack_at)] += 1;
    }
    return h;
}

struct CharacteristicHistograms {
    std::map<std::string, AttackBucketStat> attacks_histogram;
    std::map<std::string, std::int64_t> undeleted_histogram;
    std::map<std::string, std::int64_t> silent_gap_histogram;
    std::map<std::string, std::int64_t> time_to_first_attack_bins;
    double default_handle_share = 0.0;
};

inline CharacteristicHistograms characteristics(const std::vector<BotRecord>& ledger) {
    CharacteristicHistograms h;
    std::int64_t default_handles = 0;
    for (const auto& r : ledger) {
        AttackBucketStat& b = h.attacks_histogram[attack_bucket(r.attack_count)];
        b.total += 1;
        if (r.status == PlatformStatus::active) b.still_active += 1;
        h.undeleted_histogram[undeleted_bucket(r.undeleted_tweet_count)] += 1;
        h.silent_gap_histogram[silent_gap_bucket(r)] += 1;
        h.time_to_first_attack_bins[time_to_first_attack_bin(r)] += 1;
        if (r.default_handle) ++default_handles;
    }
    h.default_handle_share =
        ledger.empty() ? 0.0 : static_cast<double>(default_handles) / static_cast<double>(ledger.size());
    return h;
}

inline ReportBundle build_report(const TrendTimeline& timeline, const std::vector<TrendVerdict>& verdicts,
                                 const std::vector<BotRecord>& ledger) {
    ReportBundle r;
    r.daily_fake_share = daily_fake_share_top5(timeline, verdicts);
    LifecycleHistograms life = lifecycle_histograms(ledger);
    r.monthly_first_attack = std::move(life.monthly_first_attack);
    r.monthly_last_attack = std::move(life.monthly_last_attack);
    r.monthly_creation = std::move(life.monthly_creation);
    r.first_last_quarter_matrix = std::move(life.first_last_quarter_matrix);
    CharacteristicHistograms ch = characteristics(ledger);
    r.attacks_histogram = std::move(ch.attacks_histogram);
    r.undeleted_histogram = std::move(ch.undeleted_histogram);
    r.silent_gap_histogram = std::move(ch.silent_gap_histogram);
    r.time_to_first_attack_bins = std::move(ch.time_to_first_attack_bins);
    r.default_handle_share = ch.default_handle_share;
    return r;
}

inline Json report_to_json(const ReportBundle& r) {
    Json obj;
    obj["daily_fake_share"] = r.daily_fake_share;
    obj["monthly_first_attack"] = r.monthly_first_attack;
    obj["monthly_last_attack"] = r.monthly_last_attack;
    obj["monthly_creation"] = r.monthly_creation;
    obj["first_last_quarter_matrix"] = r.first_last_quarter_matrix;
    obj["time_to_first_attack_bins"] = r.time_to_first_attack_bins;
    Json attacks = Json::object();
    for (const auto& [bucket, stat] : r.attacks_histogram) {
        attacks[bucket] = Json{{"total", stat.total}, {"still_active", stat.still_active}};
    }
    obj["attacks_histogram"] = attacks;
    obj["undeleted_histogram"] = r.undeleted_histogram;
    obj["silent_gap_histogram"] = r.silent_gap_histogram;
    obj["default_handle_share"] = r.default_handle_share;
    return obj;
}

inline std::string format_share(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

inline void write_prevalence_csv(std::ostream& out, const ReportBundle& r) {
    out << "day,fake_share\n";
    for (const auto& [day, share] : r.daily_fake_share) out << day << ',' << format_share(share) << '\n';
}

inline void write_lifecycle_csv(std::ostream& out, const ReportBundle& r) {
    std::set<std::string> months;
    for (const auto& [m, n] : r.monthly_first_attack) months.insert(m);
    for (const auto& [m, n] : r.monthly_last_attack) months.insert(m);
    for (const auto& [m, n] : r.monthly_creation) months.insert(m);
    out << "month,first_attack,last_attack,created_still_active\n";
    auto get = [](const std::map<std::string, std::int64_t>& m, const std::string& k) {
        auto it = m.find(k);
        return it == m.end() ? 0 : it->second;
    };
    for (const auto& m : months) {
        out << m << ',' << get(r.monthly_first_attack, m) << ',' << get(r.monthly_last_attack, m) << ','
            << get(r.monthly_creation, m) << '\n';
    }
}

inline void write_quarter_matrix_csv(std::ostream& out, const ReportBundle& r) {
    out << "first_attack_quarter,last_attack_quarter,accounts\n";
    for (const auto& [key, n] : r.first_last_quarter_matrix) {
        const auto slash = key.find('/');
        out << key.substr(0, slash) << ',' << key.substr(slash + 1) << ',' << n << '\n';
    }
}

inline void write_attacks_csv(std::ostream& out, const ReportBundle& r) {
    // Buckets in numeric order, "10+" last.
    std::vector<std::string> keys;
    for (const auto& [k, v] : r.attacks_histogram) keys.push_back(k);
    std::sort(keys.begin(), keys.end(), [](const std::string& a, const std::string& b) {
        auto rank = [](const std::string& s) { return s == "10+" ? 10 : std::stoi(s); };
        return rank(a) < rank(b);
    });
    out << "attacks,accounts,still_active\n";
    for (const auto& k : keys) {
        const auto& stat = r.attacks_histogram.at(k);
        out << k << ',' << stat.total << ',' << stat.still_active << '\n';
    }
}

inline void write_undeleted_csv(std::ostream& out, const ReportBundle& r) {
    static const char* kOrder[] = {"0", "1-9", "10-99", "100-999", "1000+"};
    out << "undeleted_tweets,accounts\n";
    for (const char* k : kOrder) {
        auto it = r.undeleted_histogram.find(k);
        if (it != r.undeleted_histogram.end()) out << k << ',' << it->second << '\n';
    }
}

inline void write_silent_csv(std::ostream& out, const ReportBundle& r) {
    std::vector<std::string> keys;
    for (const auto& [k, v] : r.silent_gap_histogram) keys.push_back(k);
    std::sort(keys.begin(), keys.end(), [](const std::string& a, const std::string& b) {
        auto rank = [](const std::string& s) {
            if (s == "no visible tweets") return 1000;
            if (s == "25+") return 25;
            return std::stoi(s);
        };
        return rank(a) < rank(b);
    });
    out << "silent_months,accounts\n";
    for (const auto& k : keys) out << k << ',' << r.silent_gap_histogram.at(k) << '\n';
}

} // namespace astroturf
