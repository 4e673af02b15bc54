#include "venuepulse/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "venuepulse/errors.hpp"
#include "venuepulse/stats.hpp"

namespace venuepulse {

GrowthSummary mean_growth(std::span<const std::int64_t> series) {
    std::vector<double> positive;
    positive.reserve(series.size());
    std::size_t zeros = 0;
    for (std::int64_t v : series) {
        if (v > 0)
            positive.push_back(static_cast<double>(v));
        else
            ++zeros;
    }
    if (positive.size() < 2)
        raise(Errc::insufficient_years,
              "growth rate needs at least two non-zero years, got " +
                  std::to_string(positive.size()));

    GrowthSummary g;
    g.skipped_zero_years = zeros;
    double sum = 0.0;
    for (std::size_t i = 1; i < positive.size(); ++i)
        sum += 100.0 * (positive[i] / positive[i - 1] - 1.0);
    g.pairs = positive.size() - 1;
    g.mean_pct = sum / static_cast<double>(g.pairs);
    return g;
}

ScaleIndicators scale_indicators(std::span<const VenueYearAggregate> per_year) {
    if (per_year.size() < 2)
        raise(Errc::insufficient_years, "scale indicators need at least two years, got " +
                                            std::to_string(per_year.size()));
    std::vector<std::int64_t> papers, citations;
    papers.reserve(per_year.size());
    citations.reserve(per_year.size());
    ScaleIndicators s;
    for (const auto& agg : per_year) {
        papers.push_back(agg.n_t);
        citations.push_back(agg.c_t);
        s.pc += agg.n_t;
    }
    s.paper_growth = mean_growth(papers);
    s.citation_growth = mean_growth(citations);
    s.apgr = s.paper_growth.mean_pct;
    s.acgr = s.citation_growth.mean_pct;
    return s;
}

int h_index(std::span<const std::int64_t> sorted_citations) {
    const std::size_t n = sorted_citations.size();
    int h = 0;
    // Scanning from the most-cited end, the k-th paper (1-based) has the
    // k-th highest count; h is the largest k with count >= k.
    for (std::size_t k = 1; k <= n; ++k) {
        if (sorted_citations[n - k] >= static_cast<std::int64_t>(k))
            h = static_cast<int>(k);
        else
            break;
    }
    return h;
}

double norm_h(int h, std::int64_t pc) {
    if (pc <= 0) raise(Errc::empty_venue, "normalized H needs a positive paper count");
    return 100.0 * static_cast<double>(h) / static_cast<double>(pc);
}

CentralTail central_and_tail(std::span<const std::int64_t> sorted_citations,
                             std::int64_t hcr_threshold) {
    const std::size_t n = sorted_citations.size();
    if (n == 0) raise(Errc::empty_venue, "central/tail statistics need a non-empty vector");

    CentralTail out;
    std::int64_t total = 0;
    std::size_t high = 0, zero = 0;
    for (std::int64_t c : sorted_citations) {
        total += c;
        if (c > hcr_threshold) ++high;
        if (c == 0) ++zero;
    }
    out.ac = static_cast<double>(total) / static_cast<double>(n);
    out.mc = n % 2 == 1 ? static_cast<double>(sorted_citations[n / 2])
                        : (static_cast<double>(sorted_citations[n / 2 - 1]) +
                           static_cast<double>(sorted_citations[n / 2])) /
                              2.0;
    out.hcr = 100.0 * static_cast<double>(high) / static_cast<double>(n);
    out.zcr = 100.0 * static_cast<double>(zero) / static_cast<double>(n);
    return out;
}

MilestoneResult milestone_index(std::span<const std::int64_t> sorted_citations,
                                std::int64_t abs_threshold, double rel_quantile,
                                MilestoneMode mode, std::span<const std::int64_t> reference) {
    const std::size_t n = sorted_citations.size();
    if (n == 0) raise(Errc::empty_venue, "milestone index needs a non-empty vector");

    double rel_cut = -1.0;
    if (mode == MilestoneMode::dual) {
        if (reference.empty())
            raise(Errc::degenerate_input, "dual milestone mode needs a reference distribution");
        std::vector<double> ref(reference.begin(), reference.end());
        rel_cut = quantile_linear(ref, 1.0 - rel_quantile);
    }

    MilestoneResult out;
    for (std::int64_t c : sorted_citations) {
        if (c < abs_threshold) continue;
        if (mode == MilestoneMode::dual && static_cast<double>(c) < rel_cut) continue;
        ++out.milestone_count;
    }
    out.mii_percent = 100.0 * static_cast<double>(out.milestone_count) / static_cast<double>(n);
    return out;
}

double gini(std::span<const std::int64_t> sorted_citations) {
    const std::size_t n = sorted_citations.size();
    if (n == 0) raise(Errc::empty_venue, "Gini needs a non-empty vector");

    double total = 0.0;
    double weighted = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = static_cast<double>(sorted_citations[i]);
        total += c;
        // (2i - n - 1) with 1-based i.
        weighted += (2.0 * static_cast<double>(i + 1) - static_cast<double>(n) - 1.0) * c;
    }
    if (total == 0.0) return 0.0;  // uniform (all-zero) distribution
    // total == n*mu, so dividing by n*total gives the n^2*mu normalization.
    return weighted / (static_cast<double>(n) * total);
}

PrestigeShares prestige(const std::vector<const PaperRecord*>& records) {
    if (records.empty()) raise(Errc::empty_venue, "prestige shares need a non-empty venue");

    std::int64_t citations = 0, conf = 0, journal = 0;
    std::size_t cited_by_top_conf = 0;
    for (const PaperRecord* rec : records) {
        citations += rec->citation_count;
        conf += rec->top_conf_citations;
        journal += rec->top_journal_citations;
        if (rec->top_conf_citations >= 1) ++cited_by_top_conf;
    }

    PrestigeShares out;
    out.tcc = 100.0 * static_cast<double>(cited_by_top_conf) / static_cast<double>(records.size());
    if (citations == 0)
        raise(Errc::zero_citation_mass, "citation shares undefined with zero total citations");
    out.tcs = 100.0 * static_cast<double>(conf) / static_cast<double>(citations);
    out.tjs = 100.0 * static_cast<double>(journal) / static_cast<double>(citations);
    return out;
}

TrajectoryIndicator parse_indicator(std::string_view name) {
    if (name == "ac") return TrajectoryIndicator::ac;
    if (name == "mc") return TrajectoryIndicator::mc;
    if (name == "hcr") return TrajectoryIndicator::hcr;
    if (name == "zcr") return TrajectoryIndicator::zcr;
    if (name == "gini") return TrajectoryIndicator::gini;
    if (name == "mii") return TrajectoryIndicator::mii;
    raise(Errc::unknown_indicator, "no indicator named '" + std::string(name) +
                                       "' (expected ac|mc|hcr|zcr|gini|mii)");
}

std::string_view indicator_name(TrajectoryIndicator indicator) {
    switch (indicator) {
        case TrajectoryIndicator::ac: return "ac";
        case TrajectoryIndicator::mc: return "mc";
        case TrajectoryIndicator::hcr: return "hcr";
        case TrajectoryIndicator::zcr: return "zcr";
        case TrajectoryIndicator::gini: return "gini";
        case TrajectoryIndicator::mii: return "mii";
    }
    return "?";
}

std::vector<TrajectoryPoint> trajectory(const Corpus& corpus, std::string_view venue,
                                        TrajectoryIndicator indicator,
                                        std::int64_t hcr_threshold, std::int64_t mii_threshold) {
    std::vector<TrajectoryPoint> series;
    for (int year = corpus.window().start; year <= corpus.window().end; ++year) {
        const auto vec = citation_vector(corpus, venue, WindowMode::single_year, year);
        if (vec.empty()) continue;  // undefined year: absent, never zero
        double value = 0.0;
        switch (indicator) {
            case TrajectoryIndicator::ac: value = central_and_tail(vec, hcr_threshold).ac; break;
            case TrajectoryIndicator::mc: value = central_and_tail(vec, hcr_threshold).mc; break;
            case TrajectoryIndicator::hcr:
                value = central_and_tail(vec, hcr_threshold).hcr;
                break;
            case TrajectoryIndicator::zcr:
                value = central_and_tail(vec, hcr_threshold).zcr;
                break;
            case TrajectoryIndicator::gini: value = gini(vec); break;
            case TrajectoryIndicator::mii:
                value = milestone_index(vec, mii_threshold).mii_percent;
                break;
        }
        series.push_back({year, value});
    }
    return series;
}

}  // namespace venuepulse
