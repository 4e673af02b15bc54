#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "venuepulse/corpus.hpp"
#include "venuepulse/elasticity.hpp"
#include "venuepulse/indicators.hpp"
#include "venuepulse/ingest.hpp"

namespace venuepulse {

// Stable CLI exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitSchema = 2;      // input schema / IO problem
inline constexpr int kExitUsage = 3;       // usage or empty selection
inline constexpr int kExitGoldenDiff = 4;  // reference-table comparison failed

// Absolute per-cell tolerance when diffing a trajectory table against a
// reference file whose values are printed at 3 decimals.
inline constexpr double kGoldenTolerance = 0.005;

struct RunConfig {
    std::filesystem::path corpus_path;
    std::filesystem::path registry_path;  // empty -> compiled-in registry
    Window window{};
    std::vector<std::string> venues;  // empty -> every venue in the corpus
    std::int64_t hcr_threshold = 100;
    std::int64_t mii_threshold = 1000;
    MilestoneMode mii_mode = MilestoneMode::absolute_only;
    double unit_band = kDefaultUnitBand;
    std::string median_rule = "mean-of-middles";  // the only supported rule
    std::filesystem::path output_dir = ".";
    std::vector<std::string> output_formats{"csv"};  // subset of {csv, json}
    SourceConfig primary_source;
    SourceConfig supplemental_source;
};

// Parses a JSON config file into a RunConfig and applies environment
// overrides. Throws Error(bad_config) on unreadable files, malformed JSON,
// or invariant violations (start >= end, non-positive thresholds, unknown
// format/mode names).
RunConfig load_run_config(const std::filesystem::path& path);

// VENUEPULSE_ENDPOINT / VENUEPULSE_API_KEY replace the primary source's
// endpoint and API key; nothing else is overridable from the environment.
void apply_env_overrides(RunConfig& config);

// Throws Error(bad_config) when a RunConfig violates its invariants.
void validate_config(const RunConfig& config);

// value rendered with `precision` digits after the point, ties resolved by
// the platform's round-half-to-even double-to-decimal conversion; "-0.000"
// is normalized to "0.000".
std::string fixed(double value, int precision);

// One row per venue with the full indicator set
// (PC,APGR,ACGR,AC,MC,HCR,ZCR,H,Norm-H,MII,TCS,TJS,TCC,QQE); the QQE column
// is the mean of the defined annual magnitudes, a convention recorded in the
// .warnings sidecar and the JSON metadata.
int cmd_summary(const RunConfig& config);

// Eight-column trajectory table (Conference,Year,N_t,C_t,P_t,g_t,QQE,ln(P_t)).
// With `golden` non-empty, compares against the reference CSV (rows whose
// `flag` column is non-empty are excluded) and exits 4 on deviations beyond
// kGoldenTolerance.
int cmd_qqe(const RunConfig& config, const std::filesystem::path& golden = {});

// Per-category Spearman correlation between annual paper counts and annual
// elasticity. With `table` non-empty the series come from a long-form CSV
// (category,year,paper_count,qqe) instead of the corpus.
int cmd_correlate(const RunConfig& config, const std::filesystem::path& table = {});

// Per-venue (year,value) series for one indicator; with log_percentiles also
// emits per-year p5/p25/p50/p75/p95 of log10(1+c) over the single-year
// citation distribution.
int cmd_plotdata(const RunConfig& config, std::string_view indicator, bool log_percentiles);

// Fetches rows for the queries file (CSV: title,venue,year), falls back to
// the supplemental source for misses, consolidates, validates, deduplicates,
// and persists the result under the output directory.
int cmd_ingest(const RunConfig& config, const std::filesystem::path& queries_path);

}  // namespace venuepulse
