#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "venuepulse/corpus.hpp"

namespace venuepulse {

// Mean year-over-year percentage change of a yearly series. Zero entries
// (biennial gap years) are dropped before pairing, so growth chains across
// a gap instead of producing a -100% / undefined pair; the number of dropped
// years is reported.
struct GrowthSummary {
    double mean_pct = 0.0;
    std::size_t pairs = 0;               // consecutive pairs after zero-filtering
    std::size_t skipped_zero_years = 0;  // zero entries dropped before pairing
};

// Throws Error(insufficient_years) when fewer than two positive entries remain.
GrowthSummary mean_growth(std::span<const std::int64_t> series);

// Scale dimension: total paper count plus average paper/citation growth rates.
struct ScaleIndicators {
    std::int64_t pc = 0;    // total papers over the window
    double apgr = 0.0;      // average paper growth rate, percent
    double acgr = 0.0;      // average citation growth rate, percent
    GrowthSummary paper_growth;
    GrowthSummary citation_growth;
};

// `per_year` must be ordered by year (as produced by venue_year_series) and
// span at least two years. Throws Error(insufficient_years) otherwise.
ScaleIndicators scale_indicators(std::span<const VenueYearAggregate> per_year);

// Largest h such that at least h papers have >= h citations. The input must
// be sorted non-decreasing (as produced by citation_vector); empty -> 0.
int h_index(std::span<const std::int64_t> sorted_citations);

// H-index per 100 published papers. Throws Error(empty_venue) when pc == 0.
double norm_h(int h, std::int64_t pc);

// Influence dimension: central tendency and tail shares of a citation vector.
struct CentralTail {
    double ac = 0.0;   // mean citations
    double mc = 0.0;   // median (mean of the two middle values when even)
    double hcr = 0.0;  // percent with citations strictly above hcr_threshold
    double zcr = 0.0;  // percent with zero citations
};

// Throws Error(empty_venue) on an empty vector.
CentralTail central_and_tail(std::span<const std::int64_t> sorted_citations,
                             std::int64_t hcr_threshold = 100);

enum class MilestoneMode {
    absolute_only,  // citations >= abs_threshold
    dual,           // additionally >= the (1 - rel_quantile) quantile of a
                    // reference distribution
};

struct MilestoneResult {
    double mii_percent = 0.0;
    std::int64_t milestone_count = 0;
};

// Share of milestone papers. In dual mode `reference` supplies the citation
// distribution whose upper rel_quantile tail sets the relative cut (linear
// interpolation quantile); it must be sorted and non-empty in that mode.
// Throws Error(empty_venue) on an empty vector.
MilestoneResult milestone_index(std::span<const std::int64_t> sorted_citations,
                                std::int64_t abs_threshold = 1000,
                                double rel_quantile = 0.001,
                                MilestoneMode mode = MilestoneMode::absolute_only,
                                std::span<const std::int64_t> reference = {});

// Gini coefficient over a sorted non-decreasing citation vector:
//   G = sum_i (2i - n - 1) * c_i / (n^2 * mu),  i = 1..n.
// All-zero vectors are defined as 0. Throws Error(empty_venue) when empty.
double gini(std::span<const std::int64_t> sorted_citations);

// Prestige dimension: top-venue citation shares.
struct PrestigeShares {
    double tcs = 0.0;  // percent of citations arriving from top conferences
    double tjs = 0.0;  // percent of citations arriving from top journals
    double tcc = 0.0;  // percent of papers with >= 1 top-conference citation
};

// Throws Error(empty_venue) when `records` is empty and
// Error(zero_citation_mass) when total citations are zero (tcs/tjs undefined).
PrestigeShares prestige(const std::vector<const PaperRecord*>& records);

// Indicators available as one-year sliding-window trajectories.
enum class TrajectoryIndicator { ac, mc, hcr, zcr, gini, mii };

// Throws Error(unknown_indicator) for names outside {ac,mc,hcr,zcr,gini,mii}.
TrajectoryIndicator parse_indicator(std::string_view name);
std::string_view indicator_name(TrajectoryIndicator indicator);

struct TrajectoryPoint {
    int year = 0;
    double value = 0.0;
};

// Year-by-year indicator series over single-year citation vectors. Years with
// no papers are absent from the result, never emitted as zero.
std::vector<TrajectoryPoint> trajectory(const Corpus& corpus, std::string_view venue,
                                        TrajectoryIndicator indicator,
                                        std::int64_t hcr_threshold = 100,
                                        std::int64_t mii_threshold = 1000);

}  // namespace venuepulse
