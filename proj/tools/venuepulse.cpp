#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "venuepulse/errors.hpp"
#include "venuepulse/report.hpp"

namespace {

// Applies the shared flags on top of the (possibly file-loaded) config.
struct CommonOpts {
    std::string config_path;
    std::vector<std::string> venues;
    std::string window;
    std::vector<std::string> formats;
    std::string out_dir;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON run-configuration file");
        cmd->add_option("--venue", venues, "venue selection (repeatable; aliases resolve)");
        cmd->add_option("--window", window, "analysis window as START:END, e.g. 2014:2024");
        cmd->add_option("--format", formats, "output format: csv or json (repeatable)")
            ->check(CLI::IsMember({"csv", "json"}));
        cmd->add_option("--out", out_dir, "output directory");
    }

    venuepulse::RunConfig resolve(const std::string& corpus_flag) const {
        venuepulse::RunConfig config;
        if (!config_path.empty()) {
            config = venuepulse::load_run_config(config_path);
        } else {
            venuepulse::apply_env_overrides(config);
        }
        if (!corpus_flag.empty()) config.corpus_path = corpus_flag;
        if (!venues.empty()) config.venues = venues;
        if (!window.empty()) {
            const auto colon = window.find(':');
            if (colon == std::string::npos)
                venuepulse::raise(venuepulse::Errc::bad_config,
                                  "--window must look like 2014:2024");
            try {
                config.window.start = std::stoi(window.substr(0, colon));
                config.window.end = std::stoi(window.substr(colon + 1));
            } catch (const std::exception&) {
                venuepulse::raise(venuepulse::Errc::bad_config,
                                  "--window must look like 2014:2024");
            }
        }
        if (!formats.empty()) config.output_formats = formats;
        if (!out_dir.empty()) config.output_dir = out_dir;
        venuepulse::validate_config(config);
        return config;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"venuepulse: venue-level citation indicators, elasticity trajectories, and "
                 "field correlations from a per-paper citation ledger"};
    app.require_subcommand(1);

    CommonOpts summary_opts, qqe_opts, correlate_opts, plot_opts, ingest_opts;
    std::string summary_corpus, qqe_corpus, correlate_corpus, plot_corpus;
    std::string golden_path, table_path, indicator, queries_path;
    bool log_percentiles = false;

    auto* summary = app.add_subcommand("summary", "one row per venue with all indicators");
    summary_opts.attach(summary);
    summary->add_option("--corpus", summary_corpus, "corpus CSV/JSONL file");

    auto* qqe = app.add_subcommand("qqe", "year-over-year elasticity trajectory table");
    qqe_opts.attach(qqe);
    qqe->add_option("--corpus", qqe_corpus, "corpus CSV/JSONL file");
    qqe->add_option("--golden", golden_path, "reference trajectory CSV to diff against");

    auto* correlate =
        app.add_subcommand("correlate", "per-category Spearman of paper counts vs elasticity");
    correlate_opts.attach(correlate);
    correlate->add_option("--corpus", correlate_corpus, "corpus CSV/JSONL file");
    correlate->add_option("--table", table_path,
                          "long-form series CSV (category,year,paper_count,qqe) to correlate "
                          "instead of the corpus");

    auto* plot = app.add_subcommand("plotdata", "per-venue (year,value) indicator series");
    plot_opts.attach(plot);
    plot->add_option("--corpus", plot_corpus, "corpus CSV/JSONL file");
    plot->add_option("--indicator", indicator, "one of ac|mc|hcr|zcr|gini|mii")->required();
    plot->add_flag("--log", log_percentiles,
                   "also export per-year log10(1+c) percentiles (p5,p25,p50,p75,p95)");

    auto* ingest = app.add_subcommand("ingest", "fetch, match, consolidate and persist a corpus");
    ingest_opts.attach(ingest);
    ingest->add_option("--queries", queries_path, "CSV of title,venue,year queries")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : venuepulse::kExitUsage;
    }

    try {
        if (summary->parsed())
            return venuepulse::cmd_summary(summary_opts.resolve(summary_corpus));
        if (qqe->parsed())
            return venuepulse::cmd_qqe(qqe_opts.resolve(qqe_corpus), golden_path);
        if (correlate->parsed())
            return venuepulse::cmd_correlate(correlate_opts.resolve(correlate_corpus),
                                             table_path);
        if (plot->parsed())
            return venuepulse::cmd_plotdata(plot_opts.resolve(plot_corpus), indicator,
                                            log_percentiles);
        if (ingest->parsed())
            return venuepulse::cmd_ingest(ingest_opts.resolve(""), queries_path);
    } catch (const venuepulse::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return venuepulse::kExitUsage;
    }
    return venuepulse::kExitUsage;
}
