#pragma once

// Shared helpers for the unit tests: hand-built and randomized PaperRecords.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "venuepulse/corpus.hpp"

namespace vptest {

inline venuepulse::PaperRecord make_record(std::string id, std::string title, std::string venue,
                                           int year, std::int64_t citation_count,
                                           const venuepulse::Window& window = {}) {
    venuepulse::PaperRecord rec;
    rec.paper_id = std::move(id);
    rec.title = std::move(title);
    rec.venue = std::move(venue);
    rec.year = year;
    rec.citation_count = citation_count;
    for (int y = window.start; y <= window.end; ++y) rec.annual_citations[y] = 0;
    return rec;
}

// Deterministic random corpus rows: unique ids/titles, venues A/B/C, annual
// slices consistent with the cumulative count.
inline std::vector<venuepulse::PaperRecord> random_records(std::mt19937& rng, std::size_t n,
                                                           const venuepulse::Window& window = {}) {
    std::uniform_int_distribution<int> year_of(window.start, window.end);
    std::uniform_int_distribution<int> venue_of(0, 2);
    std::uniform_int_distribution<std::int64_t> annual_of(0, 20);
    std::uniform_int_distribution<std::int64_t> extra_of(0, 30);
    const char* venues[] = {"A", "B", "C"};

    std::vector<venuepulse::PaperRecord> records;
    records.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto rec = make_record("p" + std::to_string(i), "title " + std::to_string(i),
                               venues[venue_of(rng)], year_of(rng), 0, window);
        std::int64_t sum = 0;
        for (int y = rec.year; y <= window.end; ++y) {
            const auto c = annual_of(rng);
            rec.annual_citations[y] = c;
            sum += c;
        }
        rec.citation_count = sum + extra_of(rng);
        std::uniform_int_distribution<std::int64_t> conf_of(0, rec.citation_count);
        rec.top_conf_citations = conf_of(rng);
        rec.top_journal_citations = conf_of(rng) / 2;
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace vptest
