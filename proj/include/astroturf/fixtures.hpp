#pragma once

#include <string>
#include <vector>

#include "astroturf/simulator.hpp"

namespace astroturf {

/// Canned scenario configs. Each preset is fully determined by (seed,
/// lexicon path); the same pair always yields byte-identical outputs.
namespace presets {

namespace detail {

inline std::string fake_trend_name(int i) {
    static const char* kFirst[] = {"Sahte", "Yeni", "Büyük", "Gerçek", "Son", "Canlı", "Özel", "Derin"};
    static const char* kSecond[] = {"Gündem", "Kampanya", "Slogan", "Dalga", "Etiket", "Mesaj", "Çağrı"};
    const std::string base = std::string(kFirst[i % 8]) + kSecond[i % 7] + std::to_string(i + 1);
    // A few bare two-word keywords among the hashtags, the other shape
    // trends take.
    if (i % 7 == 3) return base + " Birliği";
    return "#" + base;
}

} // namespace detail

/// Two-day scenario at the scale of the full-data evaluation set: 72 trends
/// (58 attacked, 14 organic), roughly 37k trend-mentioning tweets with an
/// 11k/26k attack/organic balance.
inline SimConfig standard(std::uint64_t seed, const std::string& lexicon_path) {
    SimConfig c;
    c.start_at = utc_from_civil(2022, 5, 17);
    c.duration_days = 2;
    c.bot_pool_size = 3000;
    c.active_roster_fraction = 0.8;
    c.lexicon_path = lexicon_path;
    c.organic_rate = 0.35;
    c.organic_trend_count = 14;
    c.sample_rate = 1.0;
    c.seed = seed;
    for (int i = 0; i < 58; ++i) {
        AttackSpec a;
        a.trend_name = detail::fake_trend_name(i);
        const int day = i % 2;
        const int hour = 8 + (i * 5) % 14;
        const int minute = (i * 13) % 60;
        a.start_at = c.start_at + day * kSecondsPerDay + hour * 3600 + minute * 60;
        a.bot_count = 120 + (i * 37) % 160;
        a.burst_seconds = 60;
        a.delete_after_seconds = 120 + (i % 7) * 60;
        c.attacks.push_back(std::move(a));
    }
    return c;
}

/// Three-month scenario with a purge at the end of month 2 and a February
/// whose daily top-5 fake share averages 66/140 = 47.14%. Attacks land just
/// after midnight so each day's top-5 set is exactly five names.
inline SimConfig purge(std::uint64_t seed, const std::string& lexicon_path) {
    SimConfig c;
    c.start_at = utc_from_civil(2021, 1, 1);
    c.duration_days = 90;
    c.bot_pool_size = 150;
    c.active_roster_fraction = 0.4; // roster 60, reserve 90
    c.lexicon_path = lexicon_path;
    c.organic_rate = 0.02;
    c.organic_trend_count = 5;
    c.sample_rate = 1.0;
    c.seed = seed;
    c.organic_deletion_rate = 0.0;
    c.clean_organic_rate = 0.0;
    c.purge_schedule = {PurgeSpec{2, 0.6}};
    int trend_no = 0;
    for (int day = 0; day < 90; ++day) {
        const CivilDate cd = civil_of(c.start_at + day * kSecondsPerDay);
        int attacks_today = 0;
        int bots_per_attack = 0;
        if (cd.month == 1) {
            attacks_today = 2;
            bots_per_attack = 18 + day % 12;
        } else if (cd.month == 2) {
            attacks_today = cd.day <= 18 ? 2 : 3; // 18*2 + 10*3 = 66 over 28 days
            bots_per_attack = 18 + day % 12;
        } else if (cd.day <= 2) {
            attacks_today = 2; // a small tail after the purge
            bots_per_attack = 5;
        }
        for (int j = 0; j < attacks_today; ++j) {
            AttackSpec a;
            a.trend_name = "#Operasyon" + std::to_string(++trend_no);
            // Minute-aligned, just after midnight: the burst occupies one
            // window and the day's top-5 set stays at exactly five names.
            a.start_at = c.start_at + day * kSecondsPerDay + j * 120;
            a.bot_count = bots_per_attack;
            a.burst_seconds = 60;
            a.delete_after_seconds = 240;
            c.attacks.push_back(std::move(a));
        }
    }
    return c;
}

/// Small one-day scenario for smoke and determinism checks.
inline SimConfig mini(std::uint64_t seed, const std::string& lexicon_path) {
    SimConfig c;
    c.start_at = utc_from_civil(2022, 6, 1);
    c.duration_days = 1;
    c.bot_pool_size = 80;
    c.active_roster_fraction = 0.8;
    c.lexicon_path = lexicon_path;
    c.organic_rate = 0.2;
    c.organic_trend_count = 3;
    c.sample_rate = 1.0;
    c.seed = seed;
    for (int i = 0; i < 3; ++i) {
        AttackSpec a;
        a.trend_name = "#KüçükDalga" + std::to_string(i + 1);
        a.start_at = c.start_at + (9 + i * 4) * 3600 + i * 60 * 7;
        a.bot_count = 40 + i * 5;
        a.burst_seconds = 60;
        a.delete_after_seconds = 180;
        c.attacks.push_back(std::move(a));
    }
    return c;
}

/// One large attacked trend and one organic trend, emitted as a 1% sample.
/// The attack is big enough that roughly ten of its tweets survive sampling.
inline SimConfig bignet_sampled(std::uint64_t seed, const std::string& lexicon_path) {
    SimConfig c;
    c.start_at = utc_from_civil(2022, 7, 1);
    c.duration_days = 1;
    c.bot_pool_size = 1250;
    c.active_roster_fraction = 0.8;
    c.lexicon_path = lexicon_path;
    c.organic_rate = 0.5;
    c.organic_trend_count = 1;
    c.sample_rate = 0.01;
    c.seed = seed;
    c.clean_organic_rate = 0.0;
    AttackSpec a;
    a.trend_name = "#BüyükOperasyon";
    a.start_at = c.start_at + 12 * 3600;
    a.bot_count = 1000;
    a.burst_seconds = 60;
    a.delete_after_seconds = 240;
    c.attacks.push_back(std::move(a));
    return c;
}

inline SimConfig by_name(const std::string& name, std::uint64_t seed, const std::string& lexicon_path) {
    if (name == "standard") return standard(seed, lexicon_path);
    if (name == "purge") return purge(seed, lexicon_path);
    if (name == "mini") return mini(seed, lexicon_path);
    if (name == "bignet-sampled") return bignet_sampled(seed, lexicon_path);
    throw SimError("unknown preset '" + name + "' (expected standard, purge, mini, bignet-sampled)");
}

} // namespace presets

} // namespace astroturf
