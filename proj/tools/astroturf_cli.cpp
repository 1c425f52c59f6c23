// astroturf: detect ephemeral astroturfing attacks in replayed tweet streams,
// simulate attack scenarios with ground truth, and reproduce the bot-net
// analytics from the detections.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "astroturf/driver.hpp"
#include "astroturf/fixtures.hpp"
#include "astroturf/simulator.hpp"

namespace fs = std::filesystem;
using namespace astroturf;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitGateFailure = 1;
constexpr int kExitInputError = 2;

struct DetectorFlags {
    double outlier_factor = 0.02;
    int trees = 100;
    int subsample = 256;
    std::uint64_t seed = 0;
    std::int64_t gap_seconds = 60;
    std::int64_t min_attack_tweets = 4;
    double deletion_ratio = 0.45;
    int threads = 1;
    int horizon_hours = 24;

    ClassifierConfig to_config(DetectionMode mode) const {
        ClassifierConfig c;
        c.mode = mode;
        c.forest.outlier_factor = outlier_factor;
        c.forest.tree_count = trees;
        c.forest.subsample_size = subsample;
        c.forest.seed = seed;
        c.thresholds.min_attack_tweets = min_attack_tweets;
        c.thresholds.deletion_ratio_threshold = deletion_ratio;
        c.gap_seconds = gap_seconds;
        c.threads = threads;
        return c;
    }
};

void add_detector_flags(CLI::App* cmd, DetectorFlags& f) {
    cmd->add_option("--outlier-factor", f.outlier_factor, "Fraction of windows treated as anomalous")
        ->check(CLI::Range(1e-9, 0.5));
    cmd->add_option("--trees", f.trees, "Isolation forest tree count")->check(CLI::PositiveNumber);
    cmd->add_option("--subsample", f.subsample, "Isolation forest subsample size")->check(CLI::Range(2, 1 << 20));
    cmd->add_option("--seed", f.seed, "Random seed");
    cmd->add_option("--gap-seconds", f.gap_seconds, "Max gap between tweets of one attack event");
    cmd->add_option("--min-attack-tweets", f.min_attack_tweets, "Attack tweets required to call a trend fake");
    cmd->add_option("--deletion-ratio", f.deletion_ratio, "Deleted share (exclusive) required to call a trend fake");
    cmd->add_option("--threads", f.threads, "Worker threads for per-trend detection")->check(CLI::PositiveNumber);
    cmd->add_option("--horizon-hours", f.horizon_hours, "Trend matching horizon around each tweet");
}

int cmd_simulate(const std::string& config_path, const std::string& preset, std::uint64_t seed,
                 const std::string& lexicon, const fs::path& out_dir) {
    ManifestTimer timer;
    SimConfig config;
    if (!preset.empty()) {
        config = presets::by_name(preset, seed, lexicon);
    } else {
        config = sim_config_from_json(Json::parse(read_file(config_path)));
        if (config.lexicon_path.empty()) config.lexicon_path = lexicon;
    }
    SimFiles files = simulate(config, out_dir);

    RunManifest manifest;
    manifest.command = "simulate";
    manifest.seed = config.seed;
    manifest.config_fingerprint = file_fingerprint(files.config);
    if (!config_path.empty()) manifest.inputs.push_back(config_path);
    manifest.inputs.push_back(config.lexicon_path);
    for (const auto& p : {files.events, files.trends, files.statuses, files.ground_truth, files.config}) {
        manifest.outputs.push_back(p.string());
    }
    write_manifest(out_dir, manifest, timer);
    std::cout << "wrote " << files.events.string() << " and companions\n";
    return kExitOk;
}

int cmd_detect(const fs::path& stream, const fs::path& trends, const fs::path& statuses, const std::string& mode_name,
               const DetectorFlags& flags, const fs::path& out_dir) {
    ManifestTimer timer;
    auto mode = mode_from_string(mode_name);
    if (!mode) {
        std::cerr << "error: unknown mode '" << mode_name << "' (expected sample_1pct or full)\n";
        return kExitInputError;
    }
    DetectOptions opt;
    opt.stream_path = stream;
    opt.trends_path = trends;
    opt.statuses_path = statuses;
    opt.classifier = flags.to_config(*mode);
    opt.horizon_seconds = static_cast<std::int64_t>(flags.horizon_hours) * 3600;

    DetectArtifacts art = run_detect(opt, out_dir, &std::cerr);

    RunManifest manifest;
    manifest.command = "detect";
    manifest.seed = flags.seed;
    Json opts;
    opts["mode"] = to_string(*mode);
    opts["detector"] = *mode == DetectionMode::sample_1pct ? "lexicon" : "isolation_forest";
    opts["outlier_factor"] = flags.outlier_factor;
    opts["trees"] = flags.trees;
    opts["subsample"] = flags.subsample;
    opts["gap_seconds"] = flags.gap_seconds;
    opts["min_attack_tweets"] = flags.min_attack_tweets;
    opts["deletion_ratio"] = flags.deletion_ratio;
    opts["horizon_hours"] = flags.horizon_hours;
    manifest.options = opts;
    manifest.config_fingerprint = [&] {
        char buf[19];
        std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(opts.dump())));
        return std::string(buf);
    }();
    manifest.inputs = {stream.string(), trends.string()};
    if (!statuses.empty()) manifest.inputs.push_back(statuses.string());
    for (const char* name : {"verdicts.ndjson", "attack_events.ndjson", "bots.csv", "predictions.json"}) {
        manifest.outputs.push_back((out_dir / name).string());
    }
    write_manifest(out_dir, manifest, timer);

    std::int64_t fake = 0;
    for (const auto& d : art.detections) fake += d.verdict.is_fake ? 1 : 0;
    std::cout << "trends: " << art.detections.size() << ", fake: " << fake
              << ", attack tweets: " << art.attack_tweet_ids.size() << ", bots: " << art.ledger.size() << "\n";
    return kExitOk;
}

int cmd_report(const fs::path& bots, const fs::path& verdicts, const fs::path& trends, const fs::path& out_dir) {
    ManifestTimer timer;
    run_report(bots, verdicts, trends, out_dir);
    RunManifest manifest;
    manifest.command = "report";
    manifest.config_fingerprint = file_fingerprint(bots);
    manifest.inputs = {bots.string(), verdicts.string(), trends.string()};
    for (const char* name : {"report.json", "fig2_prevalence.csv", "fig3_lifecycle.csv", "fig5_quarter_matrix.csv",
                             "fig6_attacks.csv", "fig7_undeleted.csv", "fig8_silent.csv"}) {
        manifest.outputs.push_back((out_dir / name).string());
    }
    write_manifest(out_dir, manifest, timer);
    std::cout << "wrote " << (out_dir / "report.json").string() << " and figure CSVs\n";
    return kExitOk;
}

int cmd_evaluate(const std::vector<std::string>& pred_paths, const fs::path& truth_path, double gate_precision,
                 double gate_recall) {
    GroundTruth truth = load_ground_truth(truth_path);
    std::vector<EvaluationRow> rows;
    for (const auto& p : pred_paths) {
        Predictions pred = load_predictions(p);
        std::string label = pred.mode.empty() ? fs::path(p).parent_path().filename().string() : pred.mode;
        if (label.empty()) label = p;
        rows.push_back(evaluate_predictions(label, pred, truth));
    }
    print_evaluation_table(std::cout, rows);
    if (gate_precision > 0.0 || gate_recall > 0.0) {
        for (const auto& r : rows) {
            if (r.attack_tweets.precision < gate_precision || r.attack_tweets.recall < gate_recall) {
                std::cerr << "gate failure: " << r.label << " precision " << r.attack_tweets.precision
                          << " recall " << r.attack_tweets.recall << "\n";
                return kExitGateFailure;
            }
        }
    }
    return kExitOk;
}

int cmd_tune(const fs::path& stream, const fs::path& trends, const fs::path& truth_path,
             const std::vector<double>& factors, const DetectorFlags& flags) {
    GroundTruth truth = load_ground_truth(truth_path);
    ClassifierConfig base = flags.to_config(DetectionMode::full);
    TuneOutcome outcome = run_tune(stream, trends, truth, factors, base,
                                   static_cast<std::int64_t>(flags.horizon_hours) * 3600);
    std::printf("%-16s %9s %9s %9s\n", "outlier_factor", "val-prec", "val-rec", "val-F1");
    for (const auto& [factor, m] : outcome.sweep) {
        std::printf("%-16.6g %9.3f %9.3f %9.3f\n", factor, m.precision, m.recall, m.f1);
    }
    std::printf("best factor: %g\n", outcome.best_factor);
    std::printf("test split:  precision %.3f recall %.3f F1 %.3f\n", outcome.test.precision, outcome.test.recall,
                outcome.test.f1);
    return kExitOk;
}

int cmd_classify_tweet(const std::string& text, const std::vector<std::string>& trend_mentions) {
    LexiconVerdict verdict = is_lexicon_tweet(text, trend_mentions);
    TokenizedTweet tok = tokenize(text, trend_mentions);
    std::cout << "lexicon tweet: " << (verdict.is_lexicon ? "yes" : "no") << "\n";
    std::cout << "tokens (" << tok.tokens.size() << "):";
    for (const auto& t : tok.tokens) std::cout << " " << t;
    std::cout << "\nemoji count: " << tok.emoji_count << "\n";
    if (!verdict.failed_rules.empty()) {
        std::cout << "failed rules:";
        for (auto r : verdict.failed_rules) std::cout << " " << to_string(r);
        std::cout << "\n";
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ephemeral astroturfing detection toolkit"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Generate a seeded attack scenario with ground truth");
    std::string sim_config, sim_preset, sim_lexicon = "data/lexicon_tr.txt";
    std::uint64_t sim_seed = 42;
    fs::path sim_out;
    sim->add_option("--config", sim_config, "Scenario config JSON");
    sim->add_option("--preset", sim_preset, "Built-in scenario: standard, purge, mini, bignet-sampled");
    sim->add_option("--seed", sim_seed, "Seed for --preset scenarios");
    sim->add_option("--lexicon", sim_lexicon, "Word list for generated tweets");
    sim->add_option("--out", sim_out, "Output directory")->required();

    // detect
    auto* det = app.add_subcommand("detect", "Classify attack tweets, fake trends, and bots from a stream");
    fs::path det_stream, det_trends, det_statuses, det_out;
    std::string det_mode = "full";
    DetectorFlags det_flags;
    det->add_option("--stream", det_stream, "Event stream (NDJSON)")->required();
    det->add_option("--trends", det_trends, "Trend timeline CSV")->required();
    det->add_option("--statuses", det_statuses, "Account status CSV");
    det->add_option("--mode", det_mode, "sample_1pct (lexicon path) or full (isolation forest)");
    det->add_option("--out", det_out, "Output directory")->required();
    add_detector_flags(det, det_flags);

    // report
    auto* rep = app.add_subcommand("report", "Aggregate detections into the analytics report");
    fs::path rep_bots, rep_verdicts, rep_trends, rep_out;
    rep->add_option("--bots", rep_bots, "bots.csv from detect")->required();
    rep->add_option("--verdicts", rep_verdicts, "verdicts.ndjson from detect")->required();
    rep->add_option("--trends", rep_trends, "Trend timeline CSV")->required();
    rep->add_option("--out", rep_out, "Output directory")->required();

    // evaluate
    auto* eva = app.add_subcommand("evaluate", "Score predictions against simulator ground truth");
    std::vector<std::string> eva_preds;
    fs::path eva_truth;
    double eva_gate_precision = 0.0, eva_gate_recall = 0.0;
    eva->add_option("--pred", eva_preds, "predictions.json from detect (repeatable)")->required();
    eva->add_option("--truth", eva_truth, "ground_truth.json from simulate")->required();
    eva->add_option("--gate-precision", eva_gate_precision, "Exit 1 if attack-tweet precision falls below");
    eva->add_option("--gate-recall", eva_gate_recall, "Exit 1 if attack-tweet recall falls below");

    // tune
    auto* tun = app.add_subcommand("tune", "Grid-search the outlier factor on a validation split");
    fs::path tun_stream, tun_trends, tun_truth;
    std::vector<double> tun_factors;
    DetectorFlags tun_flags;
    tun->add_option("--stream", tun_stream, "Event stream (NDJSON)")->required();
    tun->add_option("--trends", tun_trends, "Trend timeline CSV")->required();
    tun->add_option("--truth", tun_truth, "ground_truth.json")->required();
    tun->add_option("--factors", tun_factors, "Outlier factor grid")->required()->delimiter(',');
    add_detector_flags(tun, tun_flags);

    // classify-tweet
    auto* cls = app.add_subcommand("classify-tweet", "Debug: run the lexicon rules on one text");
    std::string cls_text;
    std::vector<std::string> cls_trends;
    cls->add_option("--text", cls_text, "Tweet text")->required();
    cls->add_option("--trend", cls_trends, "Trend mention to strip (repeatable)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            if (sim_config.empty() == sim_preset.empty()) {
                std::cerr << "error: pass exactly one of --config or --preset\n";
                return kExitInputError;
            }
            return cmd_simulate(sim_config, sim_preset, sim_seed, sim_lexicon, sim_out);
        }
        if (det->parsed()) return cmd_detect(det_stream, det_trends, det_statuses, det_mode, det_flags, det_out);
        if (rep->parsed()) return cmd_report(rep_bots, rep_verdicts, rep_trends, rep_out);
        if (eva->parsed()) return cmd_evaluate(eva_preds, eva_truth, eva_gate_precision, eva_gate_recall);
        if (tun->parsed()) return cmd_tune(tun_stream, tun_trends, tun_truth, tun_factors, tun_flags);
        if (cls->parsed()) return cmd_classify_tweet(cls_text, cls_trends);
    } catch (const StreamError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const SimError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const Json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitOk;
}
