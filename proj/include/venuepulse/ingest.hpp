#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "venuepulse/corpus.hpp"

namespace venuepulse {

enum class SourcePriority { primary, supplemental };

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds backoff_base{500};  // doubled per retry
};

// One scholarly-API source. The client issues
//   GET {base_endpoint}/papers?title=..&venue=..&year=..
// expecting a JSON object of corpus fields on 200, or 404 for no match.
struct SourceConfig {
    std::string base_endpoint;  // scheme://host[:port], no trailing slash
    std::string api_key;        // sent as x-api-key header when non-empty
    double requests_per_second = 10.0;
    RetryPolicy retry;
    SourcePriority priority = SourcePriority::primary;
};

struct FetchQuery {
    std::string title;
    std::string venue;
    int year = 0;
};

enum class FetchStatus {
    row,       // a raw row came back
    no_match,  // the source answered, but knows no such paper
    error,     // transport failure after retries, or an unparseable body
};

struct FetchOutcome {
    FetchQuery query;
    FetchStatus status = FetchStatus::error;
    RawRecord row;                    // populated when status == row
    Errc error_code = Errc::io_failure;  // when status == error
    std::string message;
    int attempts = 0;
};

// Enforces a minimum spacing of 1/permits_per_second between acquisitions;
// shared across the worker threads of a batch.
class RateLimiter {
  public:
    explicit RateLimiter(double permits_per_second);
    void acquire();  // blocks until the next slot

  private:
    std::chrono::steady_clock::duration interval_;
    std::chrono::steady_clock::time_point next_{};
    std::mutex mu_;
};

// Fetches one raw row per query. Transient failures (connect errors, 5xx)
// are retried per policy with exponential backoff; exhausted retries and
// malformed bodies surface in the per-query outcome, never as exceptions, so
// one bad query cannot abort a batch.
std::vector<FetchOutcome> fetch_batch(const SourceConfig& source,
                                      const std::vector<FetchQuery>& queries);

enum class MatchBasis { exact_title_venue_year, unmatched };

struct MatchResult {
    std::string proceedings_title;
    bool matched = false;
    std::optional<RawRecord> matched_record;
    MatchBasis basis = MatchBasis::unmatched;
};

// Exact matching under normalize_title plus venue/year equality. Matched only
// when exactly one candidate survives all three constraints; zero or several
// survivors stay unmatched (ambiguity is never guessed away).
MatchResult match_title(std::string_view proceedings_title, std::string_view venue, int year,
                        const std::vector<RawRecord>& candidates);

struct DuplicateReport {
    std::string key;  // normalized title|venue|year
    std::string survivor_id;
    std::vector<std::string> removed_ids;
};

struct DedupResult {
    std::vector<PaperRecord> records;  // input order of the survivors
    std::vector<DuplicateReport> duplicates;
};

// One survivor per normalized (title, venue, year): the record with the
// highest citation_count, ties broken by the smallest paper_id. The survivor
// set is independent of input order.
DedupResult deduplicate(std::vector<PaperRecord> records);

// Merges two raw rows for the same paper: primary fields win wherever
// present, the supplemental row fills only gaps, and every gap-fill is noted
// in the merged row's notes ("filled from supplemental: ..."). Throws
// Error(venue_year_mismatch) when the rows disagree on venue or year.
RawRecord consolidate(const RawRecord& primary, const RawRecord& supplemental);

enum class CorpusFormat { csv, jsonl };

// Writes every record with the standard column set plus any extra columns
// present in the corpus; returns bytes written. Throws Error(io_failure).
std::size_t persist_corpus(const Corpus& corpus, const std::filesystem::path& path,
                           CorpusFormat format = CorpusFormat::csv);

// Reads a corpus persisted by persist_corpus (format chosen by extension:
// .jsonl/.ndjson parse as JSON lines, anything else as CSV). Throws
// Error(io_failure) on unreadable files and Error(schema_violation) naming
// the offending row and field on invalid content.
Corpus load_corpus(const std::filesystem::path& path, Window window = {});

}  // namespace venuepulse
