#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "astroturf/manifest.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = ASTROTURF_CLI_PATH;
const std::string kLexicon = std::string(ASTROTURF_DATA_DIR) + "/lexicon_tr.txt";
using Json = nlohmann::json;

struct CliResult {
    int exit_code = -1;
    std::string output; // stdout + stderr
};

CliResult run_cli(const std::string& args) {
    CliResult result;
    const std::string cmd = kCli + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[512];
    while (fgets(buf, sizeof(buf), pipe)) result.output += buf;
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

fs::path work(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("astroturf_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("help lists every subcommand") {
    auto r = run_cli("--help");
    CHECK(r.exit_code == 0);
    for (const char* sub : {"simulate", "detect", "report", "evaluate", "tune", "classify-tweet"}) {
        CHECK(r.output.find(sub) != std::string::npos);
    }
}

TEST_CASE("simulate fails with exit 2 when the lexicon is missing") {
    auto dir = work("nolex");
    auto r = run_cli("simulate --preset mini --seed 1 --lexicon /no/such/words.txt --out " + (dir / "sim").string());
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("/no/such/words.txt") != std::string::npos);
}

TEST_CASE("simulate accepts a config file and refuses ambiguous input") {
    auto dir = work("cfg");
    Json config;
    config["start_at"] = "2022-09-01T00:00:00Z";
    config["duration_days"] = 1;
    config["bot_pool_size"] = 60;
    config["lexicon"] = kLexicon;
    config["organic_trend_count"] = 2;
    config["organic_rate"] = 0.05;
    config["seed"] = 5;
    config["attacks"] = Json::array({Json{{"trend_name", "#DenemeDalga"},
                                                                {"start_at", "2022-09-01T10:30:00Z"},
                                                                {"bot_count", 30},
                                                                {"burst_seconds", 60},
                                                                {"delete_after_seconds", 120}}});
    const auto config_path = dir / "scenario.json";
    {
        std::ofstream out(config_path);
        out << config.dump(2);
    }
    auto ok = run_cli("simulate --config " + config_path.string() + " --out " + (dir / "sim").string());
    CHECK(ok.exit_code == 0);
    CHECK(fs::exists(dir / "sim" / "events.ndjson"));
    CHECK(fs::exists(dir / "sim" / "manifest.json"));

    auto both = run_cli("simulate --config " + config_path.string() + " --preset mini --out " +
                        (dir / "sim2").string());
    CHECK(both.exit_code == 2);
}

TEST_CASE("detect pipeline: empty stream exits 0 with empty outputs") {
    auto dir = work("empty");
    std::ofstream(dir / "events.ndjson").close();
    {
        std::ofstream trends(dir / "trends.csv");
        trends << "observed_at,rank,trend_name\n";
    }
    auto r = run_cli("detect --stream " + (dir / "events.ndjson").string() + " --trends " +
                     (dir / "trends.csv").string() + " --mode full --out " + (dir / "det").string());
    CHECK(r.exit_code == 0);
    CHECK(astroturf::read_file(dir / "det" / "verdicts.ndjson").empty());
    const std::string bots = astroturf::read_file(dir / "det" / "bots.csv");
    CHECK(bots.find("account_id,handle") == 0);
    CHECK(bots.find('\n') == bots.size() - 1); // header only
}

TEST_CASE("detect fails with exit 2 on a missing stream or malformed line") {
    auto dir = work("badstream");
    {
        std::ofstream trends(dir / "trends.csv");
        trends << "observed_at,rank,trend_name\n";
    }
    auto missing = run_cli("detect --stream /no/such/stream.ndjson --trends " + (dir / "trends.csv").string() +
                           " --mode full --out " + (dir / "det").string());
    CHECK(missing.exit_code == 2);

    {
        std::ofstream stream(dir / "events.ndjson");
        stream << "{\"type\":\"tweet\",\"id\":2}\n";
    }
    auto malformed = run_cli("detect --stream " + (dir / "events.ndjson").string() + " --trends " +
                             (dir / "trends.csv").string() + " --mode full --out " + (dir / "det").string());
    CHECK(malformed.exit_code == 2);
    CHECK(malformed.output.find("line 1") != std::string::npos);

    auto badmode = run_cli("detect --stream " + (dir / "events.ndjson").string() + " --trends " +
                           (dir / "trends.csv").string() + " --mode sideways --out " + (dir / "det").string());
    CHECK(badmode.exit_code == 2);
}

TEST_CASE("full pipeline over a scenario, evaluation and gates") {
    auto dir = work("pipeline");
    const std::string sim = (dir / "sim").string();
    auto r1 = run_cli("simulate --preset mini --seed 11 --lexicon " + kLexicon + " --out " + sim);
    REQUIRE(r1.exit_code == 0);

    const std::string det = (dir / "det").string();
    auto r2 = run_cli("detect --stream " + sim + "/events.ndjson --trends " + sim + "/trends.csv --statuses " + sim +
                      "/statuses.csv --mode full --outlier-factor 0.01 --seed 3 --out " + det);
    REQUIRE(r2.exit_code == 0);
    CHECK(r2.output.find("fake: 3") != std::string::npos);

    // The manifest records the detector path.
    auto manifest = Json::parse(astroturf::read_file(dir / "det" / "manifest.json"));
    CHECK(manifest.at("command") == "detect");
    CHECK(manifest.at("options").at("detector") == "isolation_forest");
    CHECK(manifest.at("tool_version") == astroturf::kToolVersion);

    const std::string rep = (dir / "rep").string();
    auto r3 = run_cli("report --bots " + det + "/bots.csv --verdicts " + det + "/verdicts.ndjson --trends " + sim +
                      "/trends.csv --out " + rep);
    REQUIRE(r3.exit_code == 0);
    for (const char* f : {"report.json", "fig2_prevalence.csv", "fig3_lifecycle.csv", "fig5_quarter_matrix.csv",
                          "fig6_attacks.csv", "fig7_undeleted.csv", "fig8_silent.csv"}) {
        CHECK(fs::exists(dir / "rep" / f));
    }

    auto eval = run_cli("evaluate --pred " + det + "/predictions.json --truth " + sim + "/ground_truth.json");
    CHECK(eval.exit_code == 0);
    CHECK(eval.output.find("tw-prec") != std::string::npos);
    CHECK(eval.output.find("1.000") != std::string::npos);

    // Gates: impossible recall bound fails with exit 1.
    auto gated = run_cli("evaluate --pred " + det + "/predictions.json --truth " + sim +
                         "/ground_truth.json --gate-precision 0.9 --gate-recall 1.1");
    CHECK(gated.exit_code == 1);
    CHECK(gated.output.find("gate failure") != std::string::npos);

    // Sample mode records the lexicon detector in the manifest.
    const std::string det1p = (dir / "det1p").string();
    auto r4 = run_cli("detect --stream " + sim + "/events.ndjson --trends " + sim +
                      "/trends.csv --mode sample_1pct --out " + det1p);
    REQUIRE(r4.exit_code == 0);
    auto manifest1p = Json::parse(astroturf::read_file(dir / "det1p" / "manifest.json"));
    CHECK(manifest1p.at("options").at("detector") == "lexicon");

    // Swapped evaluate inputs: the predictions file is not a ground-truth
    // file, so the schema check fails.
    auto swapped = run_cli("evaluate --pred " + sim + "/ground_truth.json --truth " + det + "/predictions.json");
    CHECK(swapped.exit_code == 2);

    // A prediction outside the scenario's universe is a universe mismatch.
    Json alien;
    alien["mode"] = "full";
    alien["attack_tweet_ids"] = {99999999};
    alien["fake_trends"] = Json::array();
    {
        std::ofstream out(dir / "alien.json");
        out << alien.dump();
    }
    auto mismatch = run_cli("evaluate --pred " + (dir / "alien.json").string() + " --truth " + sim +
                            "/ground_truth.json");
    CHECK(mismatch.exit_code == 2);
    CHECK(mismatch.output.find("universe mismatch") != std::string::npos);
}

TEST_CASE("report rejects a schema-mismatched bots csv with exit 2") {
    auto dir = work("badreport");
    {
        std::ofstream bots(dir / "bots.csv");
        bots << "account_id,wrong,header\n";
    }
    std::ofstream(dir / "verdicts.ndjson").close();
    {
        std::ofstream trends(dir / "trends.csv");
        trends << "observed_at,rank,trend_name\n";
    }
    auto r = run_cli("report --bots " + (dir / "bots.csv").string() + " --verdicts " +
                     (dir / "verdicts.ndjson").string() + " --trends " + (dir / "trends.csv").string() + " --out " +
                     (dir / "rep").string());
    CHECK(r.exit_code == 2);
}

TEST_CASE("tune prints a sweep and the chosen factor") {
    auto dir = work("tune");
    const std::string sim = (dir / "sim").string();
    REQUIRE(run_cli("simulate --preset mini --seed 21 --lexicon " + kLexicon + " --out " + sim).exit_code == 0);
    auto r = run_cli("tune --stream " + sim + "/events.ndjson --trends " + sim + "/trends.csv --truth " + sim +
                     "/ground_truth.json --factors 0.005,0.02,0.1 --seed 9");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("outlier_factor") != std::string::npos);
    CHECK(r.output.find("best factor:") != std::string::npos);
    CHECK(r.output.find("test split:") != std::string::npos);
}

TEST_CASE("classify-tweet explains the verdict") {
    auto yes = run_cli("classify-tweet --text \"kritik olmak kaynatmak #T\" --trend \"#T\"");
    CHECK(yes.exit_code == 0);
    CHECK(yes.output.find("lexicon tweet: yes") != std::string::npos);

    auto no = run_cli("classify-tweet --text \"Bak simdi 19 https://t.co/x\"");
    CHECK(no.exit_code == 0);
    CHECK(no.output.find("lexicon tweet: no") != std::string::npos);
    CHECK(no.output.find("failed rules:") != std::string::npos);
    CHECK(no.output.find("lowercase_start") != std::string::npos);
    CHECK(no.output.find("alphabetic_only") != std::string::npos);
}
