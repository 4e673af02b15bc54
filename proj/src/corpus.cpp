#include "venuepulse/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace venuepulse {

namespace {

bool is_trailing_punct(char c) {
    switch (c) {
        case '.':
        case ',':
        case ';':
        case ':':
        case '!':
        case '?':
            return true;
        default:
            return false;
    }
}

std::optional<std::string> normalize_optional(const std::optional<std::string>& value) {
    if (!value || value->empty()) return std::nullopt;
    return value;
}

}  // namespace

std::int64_t PaperRecord::annual(int year) const {
    auto it = annual_citations.find(year);
    return it == annual_citations.end() ? 0 : it->second;
}

std::string normalize_title(std::string_view title) {
    std::string out;
    out.reserve(title.size());
    bool pending_space = false;
    for (char c : title) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    while (!out.empty() && is_trailing_punct(out.back())) out.pop_back();
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

std::optional<PaperRecord> validate_record(const RawRecord& raw, const Window& window,
                                           std::vector<ValidationIssue>& issues) {
    std::size_t before = issues.size();

    auto require = [&](const std::optional<std::string>& v, const char* field) {
        if (!v || v->empty())
            issues.push_back({Errc::missing_field, field, std::string(field) + " is required"});
    };
    require(raw.title, "title");
    require(raw.venue, "venue");
    if (!raw.year)
        issues.push_back({Errc::missing_field, "year", "year is required"});
    else if (!window.contains(*raw.year))
        issues.push_back({Errc::year_out_of_window, "year",
                          "year " + std::to_string(*raw.year) + " outside " +
                              std::to_string(window.start) + ".." + std::to_string(window.end)});

    auto non_negative = [&](const std::optional<std::int64_t>& v, const char* field) {
        if (v && *v < 0)
            issues.push_back({Errc::negative_count, field,
                              std::string(field) + " is negative (" + std::to_string(*v) + ")"});
    };
    non_negative(raw.citation_count, "citationCount");
    non_negative(raw.top_conf_citations, "top_conf_citations");
    non_negative(raw.top_journal_citations, "top_journal_citations");
    for (const auto& [year, count] : raw.annual_citations) {
        if (count < 0) {
            issues.push_back({Errc::negative_count, "citations_" + std::to_string(year),
                              "annual count is negative (" + std::to_string(count) + ")"});
        }
    }

    const std::int64_t total = raw.citation_count.value_or(0);
    if (raw.top_conf_citations.value_or(0) > total)
        issues.push_back({Errc::inconsistent_counts, "top_conf_citations",
                          "top_conf_citations exceeds citationCount"});
    if (raw.top_journal_citations.value_or(0) > total)
        issues.push_back({Errc::inconsistent_counts, "top_journal_citations",
                          "top_journal_citations exceeds citationCount"});
    std::int64_t annual_sum = 0;
    for (const auto& [year, count] : raw.annual_citations) {
        if (window.contains(year) && count > 0) annual_sum += count;
    }
    if (annual_sum > total)
        issues.push_back({Errc::inconsistent_counts, "citationCount",
                          "sum of annual citations (" + std::to_string(annual_sum) +
                              ") exceeds citationCount (" + std::to_string(total) + ")"});

    if (issues.size() != before) return std::nullopt;

    PaperRecord rec;
    rec.title = *raw.title;
    rec.venue = *raw.venue;
    rec.year = *raw.year;
    // A stable fallback id for rows that lack one: derived from the identity key.
    rec.paper_id = raw.paper_id && !raw.paper_id->empty()
                       ? *raw.paper_id
                       : normalize_title(rec.title) + "|" + rec.venue + "|" +
                             std::to_string(rec.year);
    rec.ai_category = normalize_optional(raw.ai_category);
    rec.notes = normalize_optional(raw.notes);
    rec.citation_count = total;
    rec.top_conf_citations = raw.top_conf_citations.value_or(0);
    rec.top_journal_citations = raw.top_journal_citations.value_or(0);
    for (int y = window.start; y <= window.end; ++y) rec.annual_citations[y] = 0;
    for (const auto& [year, count] : raw.annual_citations) {
        if (window.contains(year)) rec.annual_citations[year] = count;
    }
    rec.extras = raw.extras;
    return rec;
}

Corpus Corpus::build(std::vector<PaperRecord> records, Window window) {
    Corpus corpus;
    corpus.window_ = window;

    std::set<std::string> seen_ids;
    std::set<std::string> seen_keys;
    for (const auto& rec : records) {
        if (!window.contains(rec.year))
            raise(Errc::year_out_of_window,
                  "record '" + rec.paper_id + "' year " + std::to_string(rec.year));
        if (!seen_ids.insert(rec.paper_id).second)
            raise(Errc::duplicate_record, "duplicate paper_id '" + rec.paper_id + "'");
        std::string key =
            normalize_title(rec.title) + "|" + rec.venue + "|" + std::to_string(rec.year);
        if (!seen_keys.insert(key).second)
            raise(Errc::duplicate_record, "duplicate (title, venue, year) for '" + rec.paper_id +
                                              "'; run deduplication first");
    }

    corpus.records_ = std::move(records);
    for (std::size_t i = 0; i < corpus.records_.size(); ++i)
        corpus.venue_index_[corpus.records_[i].venue].push_back(i);
    return corpus;
}

bool Corpus::has_venue(std::string_view venue) const {
    return venue_index_.find(venue) != venue_index_.end();
}

std::vector<std::string> Corpus::venues() const {
    std::vector<std::string> out;
    out.reserve(venue_index_.size());
    for (const auto& [venue, idx] : venue_index_) out.push_back(venue);
    return out;
}

std::vector<const PaperRecord*> Corpus::venue_records(std::string_view venue) const {
    auto it = venue_index_.find(venue);
    if (it == venue_index_.end())
        raise(Errc::unknown_venue, "venue '" + std::string(venue) + "' not in corpus");
    std::vector<const PaperRecord*> out;
    out.reserve(it->second.size());
    for (std::size_t i : it->second) out.push_back(&records_[i]);
    return out;
}

std::vector<std::string> Corpus::categories() const {
    std::set<std::string> cats;
    for (const auto& rec : records_)
        if (rec.ai_category) cats.insert(*rec.ai_category);
    return {cats.begin(), cats.end()};
}

VenueYearAggregate venue_year_aggregate(const Corpus& corpus, std::string_view venue, int year) {
    if (!corpus.window().contains(year))
        raise(Errc::year_out_of_window, "aggregate year " + std::to_string(year));
    VenueYearAggregate agg;
    agg.venue = std::string(venue);
    agg.year = year;
    if (corpus.records().empty()) return agg;  // empty corpus: all-zero aggregate
    for (const PaperRecord* rec : corpus.venue_records(venue)) {
        if (rec->year == year) {
            ++agg.n_t;
            agg.citation_vector.push_back(rec->annual(year));
        }
        if (rec->year <= year) agg.c_t += rec->annual(year);
    }
    std::sort(agg.citation_vector.begin(), agg.citation_vector.end());
    return agg;
}

std::vector<VenueYearAggregate> venue_year_series(const Corpus& corpus, std::string_view venue) {
    std::vector<VenueYearAggregate> out;
    out.reserve(corpus.window().span());
    for (int y = corpus.window().start; y <= corpus.window().end; ++y)
        out.push_back(venue_year_aggregate(corpus, venue, y));
    return out;
}

std::vector<std::int64_t> citation_vector(const Corpus& corpus, std::string_view venue,
                                          WindowMode mode, int year) {
    std::vector<std::int64_t> out;
    if (mode == WindowMode::single_year)
        return venue_year_aggregate(corpus, venue, year).citation_vector;
    for (const PaperRecord* rec : corpus.venue_records(venue)) out.push_back(rec->citation_count);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace venuepulse
