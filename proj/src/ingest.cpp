#include "venuepulse/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "venuepulse/csv.hpp"
#include "venuepulse/errors.hpp"

namespace venuepulse {

namespace {

std::string url_encode(std::string_view s) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    out.reserve(s.size());
    for (unsigned char c : s) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 0xF]);
        }
    }
    return out;
}

std::optional<std::int64_t> parse_int64(std::string_view s) {
    std::int64_t value = 0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) return std::nullopt;
    return value;
}

// "citations_2019" -> 2019; nullopt for anything else.
std::optional<int> annual_column_year(std::string_view name) {
    constexpr std::string_view prefix = "citations_";
    if (name.size() != prefix.size() + 4 || name.substr(0, prefix.size()) != prefix)
        return std::nullopt;
    const auto year = parse_int64(name.substr(prefix.size()));
    if (!year) return std::nullopt;
    return static_cast<int>(*year);
}

// Shared JSON-object -> RawRecord mapping for API responses and JSONL rows.
// Returns nullopt (with a reason) instead of throwing so fetch_batch can
// surface it per query.
std::optional<RawRecord> raw_from_json(const nlohmann::json& doc, std::string& reason) {
    if (!doc.is_object()) {
        reason = "body is not a JSON object";
        return std::nullopt;
    }
    RawRecord raw;
    auto take_string = [&](const nlohmann::json& v, std::optional<std::string>& field,
                           const char* name) {
        if (!v.is_string()) {
            reason = std::string("field '") + name + "' is not a string";
            return false;
        }
        field = v.get<std::string>();
        return true;
    };
    auto take_count = [&](const nlohmann::json& v, const char* name) -> std::optional<std::int64_t> {
        if (v.is_number_integer()) return v.get<std::int64_t>();
        if (v.is_string()) {
            if (auto parsed = parse_int64(v.get<std::string>())) return parsed;
        }
        reason = std::string("field '") + name + "' is not an integer";
        return std::nullopt;
    };

    for (const auto& [key, value] : doc.items()) {
        if (key == "paperId") {
            if (!take_string(value, raw.paper_id, "paperId")) return std::nullopt;
        } else if (key == "title") {
            if (!take_string(value, raw.title, "title")) return std::nullopt;
        } else if (key == "venue") {
            if (!take_string(value, raw.venue, "venue")) return std::nullopt;
        } else if (key == "ai_category") {
            if (!take_string(value, raw.ai_category, "ai_category")) return std::nullopt;
        } else if (key == "notes") {
            if (!take_string(value, raw.notes, "notes")) return std::nullopt;
        } else if (key == "year") {
            const auto year = take_count(value, "year");
            if (!year) return std::nullopt;
            raw.year = static_cast<int>(*year);
        } else if (key == "citationCount") {
            const auto n = take_count(value, "citationCount");
            if (!n) return std::nullopt;
            raw.citation_count = *n;
        } else if (key == "top_conf_citations") {
            const auto n = take_count(value, "top_conf_citations");
            if (!n) return std::nullopt;
            raw.top_conf_citations = *n;
        } else if (key == "top_journal_citations") {
            const auto n = take_count(value, "top_journal_citations");
            if (!n) return std::nullopt;
            raw.top_journal_citations = *n;
        } else if (const auto year = annual_column_year(key)) {
            const auto n = take_count(value, key.c_str());
            if (!n) return std::nullopt;
            raw.annual_citations[*year] = *n;
        } else {
            raw.extras[key] = value.is_string() ? value.get<std::string>() : value.dump();
        }
    }
    if (!raw.title) {
        reason = "row carries no title";
        return std::nullopt;
    }
    return raw;
}

}  // namespace

RateLimiter::RateLimiter(double permits_per_second) {
    if (permits_per_second <= 0.0)
        raise(Errc::bad_config, "rate limit must be positive requests per second");
    interval_ = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(1.0 / permits_per_second));
}

void RateLimiter::acquire() {
    std::chrono::steady_clock::time_point wake;
    {
        std::lock_guard lock(mu_);
        const auto now = std::chrono::steady_clock::now();
        wake = next_ > now ? next_ : now;
        next_ = wake + interval_;
    }
    std::this_thread::sleep_until(wake);
}

std::vector<FetchOutcome> fetch_batch(const SourceConfig& source,
                                      const std::vector<FetchQuery>& queries) {
    httplib::Client client(source.base_endpoint);
    client.set_connection_timeout(2, 0);
    client.set_read_timeout(5, 0);
    httplib::Headers headers;
    if (!source.api_key.empty()) headers.emplace("x-api-key", source.api_key);

    RateLimiter limiter(source.requests_per_second);
    const int max_attempts = std::max(1, source.retry.max_attempts);

    std::vector<FetchOutcome> outcomes;
    outcomes.reserve(queries.size());
    for (const auto& query : queries) {
        FetchOutcome out;
        out.query = query;
        const std::string path = "/papers?title=" + url_encode(query.title) +
                                 "&venue=" + url_encode(query.venue) +
                                 "&year=" + std::to_string(query.year);

        for (int attempt = 1; attempt <= max_attempts; ++attempt) {
            if (attempt > 1)
                std::this_thread::sleep_for(source.retry.backoff_base * (1 << (attempt - 2)));
            limiter.acquire();
            ++out.attempts;

            auto res = client.Get(path, headers);
            const bool transient = !res || res->status == 429 || res->status >= 500;
            if (transient) {
                out.status = FetchStatus::error;
                out.error_code = Errc::endpoint_unreachable;
                out.message = !res ? "transport failure: " + httplib::to_string(res.error())
                                   : "status " + std::to_string(res->status);
                continue;  // retry
            }
            if (res->status == 404) {
                out.status = FetchStatus::no_match;
                out.message.clear();
                break;
            }
            if (res->status != 200) {
                out.status = FetchStatus::error;
                out.error_code = Errc::malformed_response;
                out.message = "unexpected status " + std::to_string(res->status);
                break;
            }
            auto body = nlohmann::json::parse(res->body, nullptr, false);
            std::string reason;
            if (body.is_discarded()) {
                out.status = FetchStatus::error;
                out.error_code = Errc::malformed_response;
                out.message = "response body is not valid JSON";
                break;
            }
            auto raw = raw_from_json(body, reason);
            if (!raw) {
                out.status = FetchStatus::error;
                out.error_code = Errc::malformed_response;
                out.message = reason;
                break;
            }
            out.status = FetchStatus::row;
            out.row = std::move(*raw);
            out.message.clear();
            break;
        }
        if (out.status == FetchStatus::error && out.error_code == Errc::endpoint_unreachable)
            out.message = "gave up after " + std::to_string(out.attempts) +
                          " attempts: " + out.message;
        outcomes.push_back(std::move(out));
    }
    return outcomes;
}

MatchResult match_title(std::string_view proceedings_title, std::string_view venue, int year,
                        const std::vector<RawRecord>& candidates) {
    MatchResult result;
    result.proceedings_title = std::string(proceedings_title);
    const std::string want = normalize_title(proceedings_title);

    const RawRecord* survivor = nullptr;
    std::size_t survivors = 0;
    for (const auto& cand : candidates) {
        if (!cand.title || !cand.venue || !cand.year) continue;
        if (*cand.venue != venue || *cand.year != year) continue;
        if (normalize_title(*cand.title) != want) continue;
        survivor = &cand;
        ++survivors;
    }
    if (survivors == 1) {
        result.matched = true;
        result.matched_record = *survivor;
        result.basis = MatchBasis::exact_title_venue_year;
    }
    return result;
}

DedupResult deduplicate(std::vector<PaperRecord> records) {
    auto key_of = [](const PaperRecord& rec) {
        return normalize_title(rec.title) + "|" + rec.venue + "|" + std::to_string(rec.year);
    };

    // key -> index of the current survivor in `records`
    std::map<std::string, std::size_t> survivor_of;
    std::map<std::string, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const std::string key = key_of(records[i]);
        members[key].push_back(i);
        auto [it, inserted] = survivor_of.emplace(key, i);
        if (inserted) continue;
        const PaperRecord& incumbent = records[it->second];
        const PaperRecord& challenger = records[i];
        if (challenger.citation_count > incumbent.citation_count ||
            (challenger.citation_count == incumbent.citation_count &&
             challenger.paper_id < incumbent.paper_id))
            it->second = i;
    }

    DedupResult result;
    std::vector<bool> keep(records.size(), false);
    for (const auto& [key, idx] : survivor_of) keep[idx] = true;
    for (const auto& [key, idxs] : members) {
        if (idxs.size() < 2) continue;
        DuplicateReport report;
        report.key = key;
        report.survivor_id = records[survivor_of[key]].paper_id;
        for (std::size_t idx : idxs)
            if (!keep[idx]) report.removed_ids.push_back(records[idx].paper_id);
        std::sort(report.removed_ids.begin(), report.removed_ids.end());
        result.duplicates.push_back(std::move(report));
    }
    for (std::size_t i = 0; i < records.size(); ++i)
        if (keep[i]) result.records.push_back(std::move(records[i]));
    return result;
}

RawRecord consolidate(const RawRecord& primary, const RawRecord& supplemental) {
    if (primary.venue && supplemental.venue && *primary.venue != *supplemental.venue)
        raise(Errc::venue_year_mismatch, "sources disagree on venue: '" + *primary.venue +
                                             "' vs '" + *supplemental.venue + "'");
    if (primary.year && supplemental.year && *primary.year != *supplemental.year)
        raise(Errc::venue_year_mismatch,
              "sources disagree on year: " + std::to_string(*primary.year) + " vs " +
                  std::to_string(*supplemental.year));

    RawRecord merged = primary;
    std::vector<std::string> filled;
    auto fill = [&](auto& target, const auto& donor, const char* name) {
        if (!target && donor) {
            target = donor;
            filled.emplace_back(name);
        }
    };
    fill(merged.paper_id, supplemental.paper_id, "paperId");
    fill(merged.title, supplemental.title, "title");
    fill(merged.venue, supplemental.venue, "venue");
    fill(merged.year, supplemental.year, "year");
    fill(merged.ai_category, supplemental.ai_category, "ai_category");
    fill(merged.notes, supplemental.notes, "notes");
    fill(merged.citation_count, supplemental.citation_count, "citationCount");
    fill(merged.top_conf_citations, supplemental.top_conf_citations, "top_conf_citations");
    fill(merged.top_journal_citations, supplemental.top_journal_citations,
         "top_journal_citations");
    for (const auto& [year, value] : supplemental.annual_citations) {
        if (merged.annual_citations.count(year)) continue;
        merged.annual_citations[year] = value;
        filled.push_back("citations_" + std::to_string(year));
    }
    for (const auto& [key, value] : supplemental.extras)
        merged.extras.emplace(key, value);  // no provenance for opaque passthrough columns

    if (!filled.empty()) {
        std::string marker = "filled from supplemental: ";
        for (std::size_t i = 0; i < filled.size(); ++i) {
            if (i) marker += ", ";
            marker += filled[i];
        }
        merged.notes = merged.notes ? *merged.notes + " [" + marker + "]" : "[" + marker + "]";
    }
    return merged;
}

namespace {

const std::vector<std::string>& standard_columns(const Window& window,
                                                 std::vector<std::string>& storage) {
    storage = {"paperId",
               "title",
               "venue",
               "year",
               "ai_category",
               "notes",
               "citationCount",
               "top_conf_citations",
               "top_journal_citations"};
    for (int year = window.start; year <= window.end; ++year)
        storage.push_back("citations_" + std::to_string(year));
    return storage;
}

std::vector<std::string> extra_columns(const Corpus& corpus) {
    std::map<std::string, bool> keys;
    for (const auto& rec : corpus.records())
        for (const auto& [key, value] : rec.extras) keys.emplace(key, true);
    std::vector<std::string> out;
    out.reserve(keys.size());
    for (const auto& [key, unused] : keys) out.push_back(key);
    return out;
}

std::string field_by_column(const PaperRecord& rec, const std::string& column) {
    if (column == "paperId") return rec.paper_id;
    if (column == "title") return rec.title;
    if (column == "venue") return rec.venue;
    if (column == "year") return std::to_string(rec.year);
    if (column == "ai_category") return rec.ai_category.value_or("");
    if (column == "notes") return rec.notes.value_or("");
    if (column == "citationCount") return std::to_string(rec.citation_count);
    if (column == "top_conf_citations") return std::to_string(rec.top_conf_citations);
    if (column == "top_journal_citations") return std::to_string(rec.top_journal_citations);
    if (const auto year = annual_column_year(column)) return std::to_string(rec.annual(*year));
    auto it = rec.extras.find(column);
    return it == rec.extras.end() ? "" : it->second;
}

Corpus load_corpus_csv(const std::filesystem::path& path, const Window& window) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::io_failure, "cannot open corpus file " + path.string());
    csv::Reader reader(in);

    const auto header = reader.next_row();
    if (!header || header->empty())
        raise(Errc::schema_violation, "corpus file " + path.string() + " has no header row");

    std::vector<PaperRecord> records;
    std::size_t row_number = 1;  // header is row 1
    while (auto cells = reader.next_row()) {
        ++row_number;
        if (cells->size() == 1 && (*cells)[0].empty()) continue;  // stray blank line
        if (cells->size() != header->size())
            raise(Errc::schema_violation, "row " + std::to_string(row_number) + ": expected " +
                                              std::to_string(header->size()) + " cells, got " +
                                              std::to_string(cells->size()));
        RawRecord raw;
        for (std::size_t i = 0; i < header->size(); ++i) {
            const std::string& column = (*header)[i];
            const std::string& cell = (*cells)[i];
            if (cell.empty()) continue;
            auto need_int = [&]() -> std::int64_t {
                const auto parsed = parse_int64(cell);
                if (!parsed)
                    raise(Errc::schema_violation, "row " + std::to_string(row_number) +
                                                      ", field " + column + ": '" + cell +
                                                      "' is not an integer");
                return *parsed;
            };
            if (column == "paperId") raw.paper_id = cell;
            else if (column == "title") raw.title = cell;
            else if (column == "venue") raw.venue = cell;
            else if (column == "ai_category") raw.ai_category = cell;
            else if (column == "notes") raw.notes = cell;
            else if (column == "year") raw.year = static_cast<int>(need_int());
            else if (column == "citationCount") raw.citation_count = need_int();
            else if (column == "top_conf_citations") raw.top_conf_citations = need_int();
            else if (column == "top_journal_citations") raw.top_journal_citations = need_int();
            else if (const auto year = annual_column_year(column); year && window.contains(*year))
                raw.annual_citations[*year] = need_int();
            else
                raw.extras[column] = cell;
        }
        std::vector<ValidationIssue> issues;
        auto record = validate_record(raw, window, issues);
        if (!record)
            raise(Errc::schema_violation, "row " + std::to_string(row_number) + ", field " +
                                              issues.front().field + ": " +
                                              issues.front().message);
        records.push_back(std::move(*record));
    }
    return Corpus::build(std::move(records), window);
}

Corpus load_corpus_jsonl(const std::filesystem::path& path, const Window& window) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::io_failure, "cannot open corpus file " + path.string());

    std::vector<PaperRecord> records;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        auto doc = nlohmann::json::parse(line, nullptr, false);
        std::string reason = "not valid JSON";
        std::optional<RawRecord> raw;
        if (!doc.is_discarded()) raw = raw_from_json(doc, reason);
        if (!raw)
            raise(Errc::schema_violation, "line " + std::to_string(line_number) + ": " + reason);
        // Keep only window years as annual data; the rest rides along as extras.
        for (auto it = raw->annual_citations.begin(); it != raw->annual_citations.end();) {
            if (!window.contains(it->first)) {
                raw->extras["citations_" + std::to_string(it->first)] =
                    std::to_string(it->second);
                it = raw->annual_citations.erase(it);
            } else {
                ++it;
            }
        }
        std::vector<ValidationIssue> issues;
        auto record = validate_record(*raw, window, issues);
        if (!record)
            raise(Errc::schema_violation, "line " + std::to_string(line_number) + ", field " +
                                              issues.front().field + ": " +
                                              issues.front().message);
        records.push_back(std::move(*record));
    }
    return Corpus::build(std::move(records), window);
}

}  // namespace

std::size_t persist_corpus(const Corpus& corpus, const std::filesystem::path& path,
                           CorpusFormat format) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(Errc::io_failure, "cannot write corpus file " + path.string());

    std::vector<std::string> columns;
    standard_columns(corpus.window(), columns);
    const auto extras = extra_columns(corpus);
    columns.insert(columns.end(), extras.begin(), extras.end());

    if (format == CorpusFormat::csv) {
        out << csv::join_row(columns) << "\n";
        std::vector<std::string> cells(columns.size());
        for (const auto& rec : corpus.records()) {
            for (std::size_t i = 0; i < columns.size(); ++i)
                cells[i] = field_by_column(rec, columns[i]);
            out << csv::join_row(cells) << "\n";
        }
    } else {
        for (const auto& rec : corpus.records()) {
            nlohmann::ordered_json j;
            j["paperId"] = rec.paper_id;
            j["title"] = rec.title;
            j["venue"] = rec.venue;
            j["year"] = rec.year;
            if (rec.ai_category) j["ai_category"] = *rec.ai_category;
            if (rec.notes) j["notes"] = *rec.notes;
            j["citationCount"] = rec.citation_count;
            j["top_conf_citations"] = rec.top_conf_citations;
            j["top_journal_citations"] = rec.top_journal_citations;
            for (const auto& [year, value] : rec.annual_citations)
                j["citations_" + std::to_string(year)] = value;
            for (const auto& [key, value] : rec.extras) j[key] = value;
            out << j.dump() << "\n";
        }
    }
    out.flush();
    if (!out) raise(Errc::io_failure, "write failed for " + path.string());
    const auto bytes = out.tellp();
    return bytes < 0 ? 0 : static_cast<std::size_t>(bytes);
}

Corpus load_corpus(const std::filesystem::path& path, Window window) {
    const auto ext = path.extension().string();
    if (ext == ".jsonl" || ext == ".ndjson") return load_corpus_jsonl(path, window);
    return load_corpus_csv(path, window);
}

}  // namespace venuepulse
