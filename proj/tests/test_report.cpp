#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "venuepulse/csv.hpp"
#include "venuepulse/errors.hpp"
#include "venuepulse/ingest.hpp"
#include "venuepulse/registry.hpp"
#include "venuepulse/report.hpp"

using namespace venuepulse;

namespace {

const std::filesystem::path kDataDir = VP_TEST_DATA_DIR;
const std::filesystem::path kRegistryJson = VP_REGISTRY_JSON;
const std::string kCliBin = VP_CLI_BIN;

std::filesystem::path fresh_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("vp_report_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Runs the CLI through the shell; returns the exit code, optionally capturing
// combined stdout+stderr.
int run_cli(const std::string& args, std::string* output = nullptr,
            const std::string& env_prefix = "") {
    const auto capture = std::filesystem::temp_directory_path() / "vp_cli_capture.txt";
    const std::string cmd =
        env_prefix + kCliBin + " " + args + " > " + capture.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    if (output) *output = slurp(capture);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    csv::Reader reader(in);
    std::vector<std::vector<std::string>> rows;
    while (auto row = reader.next_row()) rows.push_back(std::move(*row));
    return rows;
}

}  // namespace

TEST_CASE("fixed renders deterministic decimal strings") {
    CHECK(fixed(1.0 / 3.0, 3) == "0.333");
    CHECK(fixed(-1.0 / 3.0, 3) == "-0.333");
    CHECK(fixed(2.0, 3) == "2.000");
    CHECK(fixed(1.2345678, 6) == "1.234568");
    CHECK(fixed(98.39, 2) == "98.39");
    CHECK(fixed(17.0, 0) == "17");

    // A tiny negative never prints as "-0.000".
    CHECK(fixed(-0.0001, 3) == "0.000");
    CHECK(fixed(-0.0, 2) == "0.00");
    CHECK(fixed(-0.4, 0) == "0");
}

TEST_CASE("load_run_config reads every field and applies defaults") {
    const auto dir = fresh_dir("config");
    const auto path = dir / "run.json";
    write_file(path, R"({
        "corpus": "corpus.csv",
        "registry": "reg.json",
        "out_dir": "out",
        "window": "2015:2020",
        "venues": ["ACL", "NIPS"],
        "formats": ["csv", "json"],
        "hcr_threshold": 50,
        "mii_threshold": 500,
        "mii_mode": "dual",
        "unit_band": 0.05,
        "sources": {
            "primary": {"endpoint": "http://p.example:9", "api_key": "pk",
                        "requests_per_second": 5, "max_attempts": 2, "backoff_ms": 10},
            "supplemental": {"endpoint": "http://s.example:9"}
        }
    })");
    const auto config = load_run_config(path);
    CHECK(config.corpus_path == "corpus.csv");
    CHECK(config.registry_path == "reg.json");
    CHECK(config.output_dir == "out");
    CHECK(config.window.start == 2015);
    CHECK(config.window.end == 2020);
    CHECK(config.venues == std::vector<std::string>{"ACL", "NIPS"});
    CHECK(config.output_formats == std::vector<std::string>{"csv", "json"});
    CHECK(config.hcr_threshold == 50);
    CHECK(config.mii_threshold == 500);
    CHECK(config.mii_mode == MilestoneMode::dual);
    CHECK(config.unit_band == doctest::Approx(0.05));
    CHECK(config.primary_source.base_endpoint == "http://p.example:9");
    CHECK(config.primary_source.api_key == "pk");
    CHECK(config.primary_source.retry.max_attempts == 2);
    CHECK(config.supplemental_source.base_endpoint == "http://s.example:9");
    CHECK(config.supplemental_source.priority == SourcePriority::supplemental);

    // Window can also be an object.
    write_file(path, R"({"window": {"start": 2016, "end": 2018}})");
    CHECK(load_run_config(path).window.start == 2016);
}

TEST_CASE("load_run_config rejects broken configs") {
    const auto dir = fresh_dir("badconfig");
    const auto path = dir / "run.json";

    CHECK_THROWS_AS(load_run_config(dir / "absent.json"), Error);

    const char* bad[] = {
        "not json at all",
        R"([1, 2, 3])",
        R"({"window": "hello"})",
        R"({"window": "2024:2014"})",
        R"({"formats": ["xml"]})",
        R"({"mii_mode": "triple"})",
        R"({"hcr_threshold": -1})",
        R"({"median_rule": "interpolated"})",
        R"({"sources": {"primary": {"requests_per_second": 0}}})",
        R"({"sources": {"primary": {"max_attempts": 0}}})",
    };
    for (const char* text : bad) {
        write_file(path, text);
        CAPTURE(text);
        CHECK_THROWS_AS(load_run_config(path), Error);
    }
}

TEST_CASE("environment variables override only the primary source") {
    const auto dir = fresh_dir("envconfig");
    const auto path = dir / "run.json";
    write_file(path, R"({"sources": {
        "primary": {"endpoint": "http://orig:1", "api_key": "orig"},
        "supplemental": {"endpoint": "http://supp:1", "api_key": "supp"}}})");

    setenv("VENUEPULSE_ENDPOINT", "http://env-endpoint:7", 1);
    setenv("VENUEPULSE_API_KEY", "env-key", 1);
    const auto config = load_run_config(path);
    unsetenv("VENUEPULSE_ENDPOINT");
    unsetenv("VENUEPULSE_API_KEY");

    CHECK(config.primary_source.base_endpoint == "http://env-endpoint:7");
    CHECK(config.primary_source.api_key == "env-key");
    CHECK(config.supplemental_source.base_endpoint == "http://supp:1");
    CHECK(config.supplemental_source.api_key == "supp");
}

TEST_CASE("top-venue registry resolves aliases case-insensitively") {
    const auto reg = TopVenueRegistry::builtin();
    CHECK(reg.canonicalize("NIPS") == std::optional<std::string>("NeurIPS"));
    CHECK(reg.canonicalize("neurips") == std::optional<std::string>("NeurIPS"));
    CHECK(reg.canonicalize("acl") == std::optional<std::string>("ACL"));
    CHECK(reg.canonicalize("Totally Unknown Venue") == std::nullopt);
    CHECK(reg.is_top_conference("NIPS"));
    CHECK(reg.is_top_journal("Nature"));
    CHECK(reg.is_top_journal("science"));
    CHECK_FALSE(reg.is_top_journal("ACL"));
    CHECK_FALSE(reg.is_top_conference("Nature"));
    CHECK(!reg.conferences().empty());
    CHECK(reg.journals().size() >= 2);

    // The shipped registry file matches the compiled-in table.
    const auto loaded = TopVenueRegistry::load(kRegistryJson);
    CHECK(loaded.conferences() == reg.conferences());
    CHECK(loaded.journals() == reg.journals());
    CHECK(loaded.canonicalize("NIPS") == std::optional<std::string>("NeurIPS"));

    const auto dir = fresh_dir("badreg");
    write_file(dir / "reg.json", R"({"conferences": "not an array"})");
    CHECK_THROWS_AS(TopVenueRegistry::load(dir / "reg.json"), Error);
    CHECK_THROWS_AS(TopVenueRegistry::load(dir / "missing.json"), Error);
}

TEST_CASE("summary runs are byte-identical") {
    const auto corpus = (kDataDir / "fixture_corpus.csv").string();
    const auto d1 = fresh_dir("summary1");
    const auto d2 = fresh_dir("summary2");

    for (const auto& dir : {d1, d2}) {
        const int code = run_cli("summary --corpus " + corpus + " --format csv --format json" +
                                 " --out " + dir.string());
        CHECK(code == kExitOk);
    }
    for (const char* name : {"summary.csv", "summary.json", "summary.warnings"}) {
        CAPTURE(name);
        REQUIRE(std::filesystem::exists(d1 / name));
        CHECK(slurp(d1 / name) == slurp(d2 / name));
    }

    const auto rows = read_csv(d1 / "summary.csv");
    REQUIRE(rows.size() == 3);  // header + ACL + NeurIPS
    CHECK(rows[0][0] == "Conference");
    CHECK(rows[1][0] == "ACL");
    CHECK(rows[2][0] == "NeurIPS");
    // PC column: fixture has 7 ACL and 7 NeurIPS papers.
    CHECK(rows[1][1] == "7");
    CHECK(rows[2][1] == "7");

    // The elasticity column convention is recorded in the sidecar.
    const auto warnings = slurp(d1 / "summary.warnings");
    CHECK(warnings.find("mean of the defined annual |QQE| magnitudes") != std::string::npos);
}

TEST_CASE("qqe output agrees with itself under golden comparison") {
    const auto corpus = (kDataDir / "fixture_corpus.csv").string();
    const auto d1 = fresh_dir("qqe1");
    REQUIRE(run_cli("qqe --corpus " + corpus + " --out " + d1.string()) == kExitOk);
    REQUIRE(std::filesystem::exists(d1 / "qqe.csv"));

    // Self-comparison passes and reports the row count.
    const auto d2 = fresh_dir("qqe2");
    std::string output;
    const int code = run_cli("qqe --corpus " + corpus + " --golden " + (d1 / "qqe.csv").string() +
                                 " --out " + d2.string(),
                             &output);
    CHECK(code == kExitOk);
    CHECK(output.find("reference comparison") != std::string::npos);

    // A perturbed cell beyond the tolerance trips exit code 4.
    auto rows = read_csv(d1 / "qqe.csv");
    bool perturbed = false;
    for (auto& row : rows) {
        if (!perturbed && row.size() >= 7 && row[6] != "QQE" && row[6] != "-") {
            row[6] = fixed(std::stod(row[6]) + 0.1, 3);
            perturbed = true;
        }
    }
    REQUIRE(perturbed);
    std::string text;
    for (const auto& row : rows) text += csv::join_row(row) + "\n";
    write_file(d1 / "qqe_perturbed.csv", text);

    const int diff_code = run_cli("qqe --corpus " + corpus + " --golden " +
                                      (d1 / "qqe_perturbed.csv").string() + " --out " +
                                      d2.string(),
                                  &output);
    CHECK(diff_code == kExitGoldenDiff);
    CHECK(output.find("QQE") != std::string::npos);
}

TEST_CASE("schema problems exit 2, selection problems exit 3") {
    const auto dir = fresh_dir("exitcodes");
    const auto bad = dir / "bad_corpus.csv";
    write_file(bad,
               "paperId,title,venue,year,citationCount\n"
               "p1,Broken row,ACL,2020,-5\n");
    CHECK(run_cli("summary --corpus " + bad.string() + " --out " + dir.string()) == kExitSchema);

    const auto good = (kDataDir / "fixture_corpus.csv").string();
    CHECK(run_cli("summary --corpus " + good + " --venue Nowhere --out " + dir.string()) ==
          kExitUsage);
    CHECK(run_cli("plotdata --corpus " + good + " --indicator pagerank --out " + dir.string()) ==
          kExitUsage);
    CHECK(run_cli("summary --corpus " + good + " --no-such-flag") == kExitUsage);
    CHECK(run_cli("qqe --corpus " + dir.string() + "/absent.csv --out " + dir.string()) ==
          kExitSchema);
}

TEST_CASE("correlate reproduces the category correlation table") {
    const auto table = (kDataDir / "category_series.csv").string();
    const auto dir = fresh_dir("correlate");
    REQUIRE(run_cli("correlate --table " + table + " --out " + dir.string()) == kExitOk);

    const auto rows = read_csv(dir / "correlate.csv");
    REQUIRE(rows.size() == 10);  // header + 9 categories
    CHECK(rows[0] == std::vector<std::string>{"Category", "N", "R", "P", "Significant"});

    std::map<std::string, std::vector<std::string>> by_category;
    int significant = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        by_category[rows[i][0]] = rows[i];
        CHECK(rows[i][1] == "10");  // 2015..2024 points
        if (rows[i][4] == "yes") ++significant;
    }
    CHECK(significant == 8);

    const auto check_row = [&](const std::string& category, const std::string& r,
                               const std::string& p, const std::string& sig) {
        CAPTURE(category);
        REQUIRE(by_category.count(category) == 1);
        const auto& row = by_category[category];
        CHECK(row[2] == r);
        CHECK(row[3] == p);
        CHECK(row[4] == sig);
    };
    check_row("Representation Learning & Optimization", "-0.915", "0.000", "yes");
    check_row("Machine Learning (incl. Deep Learning)", "-0.939", "0.000", "yes");
    check_row("AI Foundations & Theory", "-0.455", "0.187", "no");
    check_row("Computer Vision (CV)", "-0.673", "0.033", "yes");
    check_row("Reinforcement Learning & Decision Making", "-0.948", "0.000", "yes");
    check_row("Interpretability, Fairness & Applications", "-0.867", "0.001", "yes");
}

TEST_CASE("correlate also works from corpus categories") {
    const auto corpus = (kDataDir / "fixture_corpus.csv").string();
    const auto dir = fresh_dir("correlate_corpus");
    REQUIRE(run_cli("correlate --corpus " + corpus + " --out " + dir.string()) == kExitOk);
    const auto rows = read_csv(dir / "correlate.csv");
    REQUIRE(rows.size() == 3);  // header + Theory + Systems
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK((rows[i][0] == "Theory" || rows[i][0] == "Systems"));
        CHECK(std::stoi(rows[i][1]) >= 3);
    }
}

TEST_CASE("plotdata emits per-year indicator series") {
    const auto corpus = (kDataDir / "fixture_corpus.csv").string();
    const auto dir = fresh_dir("plotdata");
    REQUIRE(run_cli("plotdata --corpus " + corpus + " --indicator ac --venue ACL --out " +
                    dir.string()) == kExitOk);

    const auto rows = read_csv(dir / "plot_ac_ACL.csv");
    REQUIRE(rows.size() == 5);  // header + 2014..2017 (later years have no papers)
    CHECK(rows[0] == std::vector<std::string>{"Year", "Value"});
    CHECK(rows[1] == std::vector<std::string>{"2014", "1.000000"});
    CHECK(rows[2] == std::vector<std::string>{"2015", "34.000000"});
    CHECK(rows[3] == std::vector<std::string>{"2016", "602.000000"});
    CHECK(rows[4] == std::vector<std::string>{"2017", "30.000000"});
}

TEST_CASE("plotdata --log emits log-scale percentiles") {
    // Four 2015 papers with 0, 0, 5 and 200 same-year citations.
    const auto dir = fresh_dir("plotlog");
    std::string text =
        "paperId,title,venue,year,citationCount,citations_2015\n"
        "p1,First paper,ACL,2015,0,0\n"
        "p2,Second paper,ACL,2015,0,0\n"
        "p3,Third paper,ACL,2015,5,5\n"
        "p4,Fourth paper,ACL,2015,200,200\n";
    write_file(dir / "corpus.csv", text);

    REQUIRE(run_cli("plotdata --corpus " + (dir / "corpus.csv").string() +
                    " --indicator zcr --log --out " + dir.string()) == kExitOk);
    const auto rows = read_csv(dir / "plot_log10pct_ACL.csv");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<std::string>{"Year", "P5", "P25", "P50", "P75", "P95"});
    CHECK(rows[1] == std::vector<std::string>{"2015", "0.000000", "0.000000", "0.389076",
                                              "1.159412", "2.074439"});
}

TEST_CASE("ingest fetches, consolidates and persists a corpus") {
    httplib::Server server;
    server.Get("/papers", [](const httplib::Request& req, httplib::Response& res) {
        nlohmann::json body;
        body["paperId"] = "srv-" + req.get_param_value("title").substr(0, 8);
        body["title"] = req.get_param_value("title");
        body["venue"] = req.get_param_value("venue");
        body["year"] = std::stoi(req.get_param_value("year"));
        body["citationCount"] = 11;
        body["citations_2020"] = 11;
        res.set_content(body.dump(), "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread listener([&server] { server.listen_after_bind(); });
    server.wait_until_ready();

    const auto dir = fresh_dir("ingest");
    write_file(dir / "queries.csv",
               "title,venue,year\n"
               "Paper one,ACL,2020\n"
               "Paper two,ACL,2021\n");
    write_file(dir / "run.json", R"({"sources": {"primary": {
        "endpoint": "http://127.0.0.1:)" + std::to_string(port) +
                                 R"(", "requests_per_second": 1000,
        "max_attempts": 2, "backoff_ms": 1}}})");

    std::string output;
    const int code = run_cli("ingest --queries " + (dir / "queries.csv").string() + " --config " +
                                 (dir / "run.json").string() + " --out " + dir.string(),
                             &output);
    CHECK(code == kExitOk);
    CHECK(output.find("2") != std::string::npos);

    const auto corpus = load_corpus(dir / "ingested.csv");
    REQUIRE(corpus.records().size() == 2);
    CHECK(corpus.records()[0].citation_count == 11);
    CHECK(std::filesystem::exists(dir / "ingested.warnings"));

    // The endpoint environment override beats a dead config endpoint.
    const auto dir2 = fresh_dir("ingest_env");
    write_file(dir2 / "run.json", R"({"sources": {"primary": {
        "endpoint": "http://127.0.0.1:1", "requests_per_second": 1000,
        "max_attempts": 1, "backoff_ms": 1}}})");
    const int env_code =
        run_cli("ingest --queries " + (dir / "queries.csv").string() + " --config " +
                    (dir2 / "run.json").string() + " --out " + dir2.string(),
                nullptr, "VENUEPULSE_ENDPOINT=http://127.0.0.1:" + std::to_string(port) + " ");
    CHECK(env_code == kExitOk);
    CHECK(load_corpus(dir2 / "ingested.csv").records().size() == 2);

    server.stop();
    listener.join();
}
