#pragma once

#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "astroturf/analytics.hpp"
#include "astroturf/bot_ledger.hpp"
#include "astroturf/manifest.hpp"
#include "astroturf/simulator.hpp"
#include "astroturf/trend_classifier.hpp"

namespace astroturf {

/// End-to-end pipeline runs shared by the CLI and the acceptance suite.

struct DetectOptions {
    std::filesystem::path stream_path;
    std::filesystem::path trends_path;
    std::filesystem::path statuses_path; // optional; empty means "no file"
    ClassifierConfig classifier;
    std::int64_t horizon_seconds = kDefaultTrendHorizonSeconds;
};

struct DetectArtifacts {
    std::vector<TrendDetection> detections;
    std::vector<BotRecord> ledger;
    std::set<TweetId> attack_tweet_ids;
    std::set<std::string> fake_trends;
};

inline DetectArtifacts detect_in_memory(const DetectOptions& opt, std::ostream* warnings = nullptr) {
    std::ifstream in(opt.stream_path);
    if (!in) throw StreamError(0, "cannot open stream file: " + opt.stream_path.string());
    TrendTimeline timeline = load_trend_timeline(opt.trends_path.string());
    StreamReader reader(in);
    StreamScan scan = scan_stream(reader, timeline, opt.horizon_seconds);

    DetectArtifacts art;
    art.detections = classify_all_trends(scan, opt.classifier);

    std::map<AccountId, AccountStatus> statuses;
    if (!opt.statuses_path.empty()) statuses = load_account_statuses(opt.statuses_path.string());
    art.ledger = build_bot_ledger(art.detections, scan.accounts, scan.deletions, statuses, warnings);

    for (const auto& d : art.detections) {
        art.attack_tweet_ids.insert(d.attack_tweet_ids.begin(), d.attack_tweet_ids.end());
        if (d.verdict.is_fake) art.fake_trends.insert(d.verdict.trend_name);
    }
    return art;
}

inline void write_detect_outputs(const DetectArtifacts& art, const DetectionMode mode,
                                 const std::filesystem::path& out_dir) {
    std::ostringstream verdicts;
    for (const auto& d : art.detections) verdicts << verdict_to_json(d.verdict).dump() << '\n';
    write_file_atomic(out_dir / "verdicts.ndjson", verdicts.str());

    std::ostringstream events;
    for (const auto& d : art.detections) {
        for (const auto& ev : d.events) events << attack_event_to_json(ev).dump() << '\n';
    }
    write_file_atomic(out_dir / "attack_events.ndjson", events.str());

    std::ostringstream bots;
    write_bots_csv(bots, art.ledger);
    write_file_atomic(out_dir / "bots.csv", bots.str());

    Json pred;
    pred["mode"] = to_string(mode);
    pred["attack_tweet_ids"] = art.attack_tweet_ids;
    pred["fake_trends"] = art.fake_trends;
    write_file_atomic(out_dir / "predictions.json", pred.dump(2) + "\n");
}

inline DetectArtifacts run_detect(const DetectOptions& opt, const std::filesystem::path& out_dir,
                                  std::ostream* warnings = nullptr) {
    DetectArtifacts art = detect_in_memory(opt, warnings);
    write_detect_outputs(art, opt.classifier.mode, out_dir);
    return art;
}

inline std::vector<TrendVerdict> load_verdicts(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw StreamError(0, "cannot open verdicts file: " + path.string());
    std::vector<TrendVerdict> verdicts;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        Json obj = Json::parse(line, nullptr, false);
        if (obj.is_discarded()) throw StreamError(line_no, "verdict line is not valid JSON");
        try {
            verdicts.push_back(verdict_from_json(obj));
        } catch (const Json::exception& e) {
            throw StreamError(line_no, std::string("verdict schema mismatch: ") + e.what());
        }
    }
    return verdicts;
}

inline ReportBundle run_report(const std::filesystem::path& bots_csv, const std::filesystem::path& verdicts_path,
                               const std::filesystem::path& trends_path, const std::filesystem::path& out_dir) {
    std::vector<BotRecord> ledger = load_bots_csv(bots_csv.string());
    std::vector<TrendVerdict> verdicts = load_verdicts(verdicts_path);
    TrendTimeline timeline = load_trend_timeline(trends_path.string());

    ReportBundle report = build_report(timeline, verdicts, ledger);
    write_file_atomic(out_dir / "report.json", report_to_json(report).dump(2) + "\n");

    auto emit = [&](const char* name, auto writer) {
        std::ostringstream out;
        writer(out, report);
        write_file_atomic(out_dir / name, out.str());
    };
    emit("fig2_prevalence.csv", [](std::ostream& o, const ReportBundle& r) { write_prevalence_csv(o, r); });
    emit("fig3_lifecycle.csv", [](std::ostream& o, const ReportBundle& r) { write_lifecycle_csv(o, r); });
    emit("fig5_quarter_matrix.csv", [](std::ostream& o, const ReportBundle& r) { write_quarter_matrix_csv(o, r); });
    emit("fig6_attacks.csv", [](std::ostream& o, const ReportBundle& r) { write_attacks_csv(o, r); });
    emit("fig7_undeleted.csv", [](std::ostream& o, const ReportBundle& r) { write_undeleted_csv(o, r); });
    emit("fig8_silent.csv", [](std::ostream& o, const ReportBundle& r) { write_silent_csv(o, r); });
    return report;
}

struct Predictions {
    std::string mode;
    std::set<TweetId> attack_tweet_ids;
    std::set<std::string> fake_trends;
};

inline Predictions load_predictions(const std::filesystem::path& path) {
    Json obj = Json::parse(read_file(path), nullptr, false);
    if (obj.is_discarded() || !obj.is_object() || !obj.contains("attack_tweet_ids") ||
        !obj.contains("fake_trends")) {
        throw StreamError(0, "not a predictions file: " + path.string());
    }
    Predictions p;
    p.mode = obj.value("mode", "");
    for (const auto& v : obj.at("attack_tweet_ids")) p.attack_tweet_ids.insert(v.get<TweetId>());
    for (const auto& v : obj.at("fake_trends")) p.fake_trends.insert(v.get<std::string>());
    return p;
}

struct EvaluationRow {
    std::string label;
    Metrics attack_tweets;
    Metrics fake_trends;
};

/// Scores predictions against ground truth. Predicted attack ids must lie
/// inside the scenario's tweet universe; anything else means the files do
/// not describe the same run.
inline EvaluationRow evaluate_predictions(const std::string& label, const Predictions& pred,
                                          const GroundTruth& truth) {
    for (TweetId id : pred.attack_tweet_ids) {
        if (!truth.tweet_universe.count(id)) {
            throw StreamError(0, "universe mismatch: predicted tweet " + std::to_string(id) +
                                     " is not part of the ground-truth scenario");
        }
    }
    EvaluationRow row;
    row.label = label;
    row.attack_tweets = evaluate_labels(pred.attack_tweet_ids, truth.attack_tweet_ids);
    row.fake_trends = evaluate_labels(pred.fake_trends, truth.fake_trends);
    return row;
}

inline void print_evaluation_table(std::ostream& out, const std::vector<EvaluationRow>& rows) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-28s %9s %9s %9s   %9s %9s %9s", "run", "tw-prec", "tw-rec", "tw-F1",
                  "tr-prec", "tr-rec", "tr-F1");
    out << buf << '\n';
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%-28s %9.3f %9.3f %9.3f   %9.3f %9.3f %9.3f", r.label.c_str(),
                      r.attack_tweets.precision, r.attack_tweets.recall, r.attack_tweets.f1,
                      r.fake_trends.precision, r.fake_trends.recall, r.fake_trends.f1);
        out << buf << '\n';
    }
}

struct TuneOutcome {
    double best_factor = 0.0;
    Metrics validation;
    Metrics test;
    std::vector<std::pair<double, Metrics>> sweep;
};

/// Grid-searches the outlier factor: full-mode detection on a validation
/// split of the trends (first 80% by sorted name), F1 on attack tweets,
/// ties to the smaller factor; the held-out split is scored once with the
/// winner.
inline TuneOutcome run_tune(const std::filesystem::path& stream_path, const std::filesystem::path& trends_path,
                            const GroundTruth& truth, const std::vector<double>& factor_grid,
                            ClassifierConfig base, std::int64_t horizon_seconds = kDefaultTrendHorizonSeconds) {
    if (factor_grid.empty()) throw SimError("tune: empty factor grid");
    std::ifstream in(stream_path);
    if (!in) throw StreamError(0, "cannot open stream file: " + stream_path.string());
    TrendTimeline timeline = load_trend_timeline(trends_path.string());
    StreamReader reader(in);
    StreamScan scan = scan_stream(reader, timeline, horizon_seconds);

    std::vector<std::string> names;
    for (const auto& [name, tweets] : scan.trend_tweets) names.push_back(name);
    const std::size_t validation_count = names.size() - names.size() / 5;
    std::set<std::string> validation_trends(names.begin(),
                                            names.begin() + static_cast<std::ptrdiff_t>(validation_count));

    auto universe_of = [&](bool validation) {
        std::set<TweetId> ids;
        for (const auto& [name, tweets] : scan.trend_tweets) {
            if (validation != (validation_trends.count(name) > 0)) continue;
            for (const auto& t : tweets) ids.insert(t.tweet_id);
        }
        return ids;
    };
    const std::set<TweetId> val_universe = universe_of(true);
    const std::set<TweetId> test_universe = universe_of(false);
    auto restrict_to = [](const std::set<TweetId>& ids, const std::set<TweetId>& universe) {
        std::set<TweetId> out;
        for (TweetId id : ids) {
            if (universe.count(id)) out.insert(id);
        }
        return out;
    };
    const std::set<TweetId> val_truth = restrict_to(truth.attack_tweet_ids, val_universe);
    const std::set<TweetId> test_truth = restrict_to(truth.attack_tweet_ids, test_universe);

    auto flagged_at = [&](double factor) {
        ClassifierConfig config = base;
        config.mode = DetectionMode::full;
        config.forest.outlier_factor = factor;
        std::set<TweetId> flagged;
        for (const auto& d : classify_all_trends(scan, config)) {
            flagged.insert(d.attack_tweet_ids.begin(), d.attack_tweet_ids.end());
        }
        return flagged;
    };

    TuneOutcome outcome;
    bool first = true;
    for (double factor : factor_grid) {
        Metrics m = evaluate_labels(restrict_to(flagged_at(factor), val_universe), val_truth);
        outcome.sweep.emplace_back(factor, m);
        if (first || m.f1 > outcome.validation.f1 ||
            (m.f1 == outcome.validation.f1 && factor < outcome.best_factor)) {
            outcome.best_factor = factor;
            outcome.validation = m;
            first = false;
        }
    }
    outcome.test = evaluate_labels(restrict_to(flagged_at(outcome.best_factor), test_universe), test_truth);
    return outcome;
}

} // namespace astroturf
