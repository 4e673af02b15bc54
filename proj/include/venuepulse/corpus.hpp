#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "venuepulse/errors.hpp"

namespace venuepulse {

// Inclusive year range the analysis operates on.
struct Window {
    int start = 2014;
    int end = 2024;

    bool contains(int year) const { return year >= start && year <= end; }
    int span() const { return end - start + 1; }
    bool operator==(const Window&) const = default;
};

// One paper of a venue's proceedings, with its citation ledger: the lifetime
// citation total, the slice of citations arriving from top-tier conferences
// and journals, and the per-year citation counts inside the window.
struct PaperRecord {
    std::string paper_id;
    std::string title;
    std::string venue;
    int year = 0;  // publication year
    std::optional<std::string> ai_category;
    std::optional<std::string> notes;
    std::int64_t citation_count = 0;
    std::int64_t top_conf_citations = 0;
    std::int64_t top_journal_citations = 0;
    std::map<int, std::int64_t> annual_citations;  // year -> citations received that year
    std::map<std::string, std::string> extras;     // unknown input columns, preserved verbatim

    std::int64_t annual(int year) const;
    bool operator==(const PaperRecord&) const = default;
};

// Pre-validation row as parsed from CSV/JSONL or an API response: every
// field may be absent.
struct RawRecord {
    std::optional<std::string> paper_id;
    std::optional<std::string> title;
    std::optional<std::string> venue;
    std::optional<int> year;
    std::optional<std::string> ai_category;
    std::optional<std::string> notes;
    std::optional<std::int64_t> citation_count;
    std::optional<std::int64_t> top_conf_citations;
    std::optional<std::int64_t> top_journal_citations;
    std::map<int, std::int64_t> annual_citations;
    std::map<std::string, std::string> extras;
};

struct ValidationIssue {
    Errc code;  // missing_field | negative_count | year_out_of_window | inconsistent_counts
    std::string field;
    std::string message;
};

// Matching/dedup key normalization: lowercase (ASCII), collapse runs of
// whitespace to single spaces, trim, and strip trailing punctuation.
std::string normalize_title(std::string_view title);

// Checks `raw` against the record invariants. On success returns a record
// with defaults applied (missing counts -> 0, window years materialized,
// empty optional strings -> absent). On failure returns nullopt and appends
// at least one issue.
std::optional<PaperRecord> validate_record(const RawRecord& raw, const Window& window,
                                           std::vector<ValidationIssue>& issues);

// Validated, immutable record collection. Enforces unique paper_id and
// unique (normalized title, venue, year) across records.
class Corpus {
  public:
    Corpus() = default;

    // Throws Error(duplicate_record) when an invariant is violated and
    // Error(year_out_of_window) when a record lies outside `window`.
    static Corpus build(std::vector<PaperRecord> records, Window window = {});

    const Window& window() const { return window_; }
    const std::vector<PaperRecord>& records() const { return records_; }
    bool has_venue(std::string_view venue) const;
    std::vector<std::string> venues() const;  // sorted unique
    std::vector<const PaperRecord*> venue_records(std::string_view venue) const;
    std::vector<std::string> categories() const;  // sorted unique ai_category values

  private:
    std::vector<PaperRecord> records_;
    Window window_;
    std::map<std::string, std::vector<std::size_t>, std::less<>> venue_index_;
};

// Per-venue, per-year roll-up.
//   n_t: papers published in `year`.
//   c_t: citations received during `year` by the venue's papers published in
//        or before `year` (the venue's citation mass for that year).
//   citation_vector: year-`year` citation counts of the papers published in
//        `year`, sorted non-decreasing (the one-year sliding window slice).
struct VenueYearAggregate {
    std::string venue;
    int year = 0;
    std::int64_t n_t = 0;
    std::int64_t c_t = 0;
    std::vector<std::int64_t> citation_vector;
};

VenueYearAggregate venue_year_aggregate(const Corpus& corpus, std::string_view venue, int year);

// All window years in ascending order (gap years appear with n_t = 0).
std::vector<VenueYearAggregate> venue_year_series(const Corpus& corpus, std::string_view venue);

enum class WindowMode {
    cumulative,   // lifetime citation_count of every paper of the venue
    single_year,  // year-t citations of papers published in t
};

// Sorted (non-decreasing) per-paper citation values for `venue` under the
// chosen mode; `year` is required for single_year.
std::vector<std::int64_t> citation_vector(const Corpus& corpus, std::string_view venue,
                                          WindowMode mode, int year = 0);

}  // namespace venuepulse
