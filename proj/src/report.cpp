#include "venuepulse/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "json.hpp"
#include "venuepulse/csv.hpp"
#include "venuepulse/errors.hpp"
#include "venuepulse/registry.hpp"
#include "venuepulse/stats.hpp"

namespace venuepulse {

namespace {

constexpr const char* kQqeConvention =
    "note: summary QQE column is the mean of the defined annual |QQE| magnitudes "
    "over the window";

int exit_code_for(const Error& e) {
    switch (e.code()) {
        case Errc::schema_violation:
        case Errc::io_failure:
        case Errc::missing_field:
        case Errc::negative_count:
        case Errc::inconsistent_counts:
        case Errc::year_out_of_window:
        case Errc::duplicate_record:
        case Errc::malformed_response:
            return kExitSchema;
        default:
            return kExitUsage;
    }
}

std::string dash() { return "-"; }

std::string opt_fixed(const std::optional<double>& value, int precision) {
    return value ? fixed(*value, precision) : dash();
}

nlohmann::ordered_json opt_json(const std::optional<double>& value) {
    if (!value) return nullptr;
    return *value;
}

TopVenueRegistry registry_for(const RunConfig& config) {
    if (config.registry_path.empty()) return TopVenueRegistry::builtin();
    return TopVenueRegistry::load(config.registry_path);
}

bool wants_format(const RunConfig& config, std::string_view format) {
    return std::find(config.output_formats.begin(), config.output_formats.end(), format) !=
           config.output_formats.end();
}

// Resolves the requested venue list (canonicalizing aliases) against the
// corpus; an empty request selects every corpus venue.
std::vector<std::string> select_venues(const RunConfig& config, const Corpus& corpus,
                                       const TopVenueRegistry& registry,
                                       std::vector<std::string>& warnings) {
    if (config.venues.empty()) return corpus.venues();
    std::vector<std::string> out;
    for (const auto& requested : config.venues) {
        std::string name = requested;
        if (!corpus.has_venue(name)) {
            if (auto canon = registry.canonicalize(requested); canon && corpus.has_venue(*canon))
                name = *canon;
        }
        if (!corpus.has_venue(name)) {
            warnings.push_back("venue '" + requested + "' not present in corpus; skipped");
            continue;
        }
        if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(Errc::io_failure, "cannot write " + path.string());
    out << content;
    if (!out.flush()) raise(Errc::io_failure, "write failed for " + path.string());
}

void write_warnings(const std::filesystem::path& path, const std::vector<std::string>& warnings) {
    std::string content;
    for (const auto& w : warnings) content += w + "\n";
    write_text_file(path, content);
}

std::string sanitize_filename(std::string_view name) {
    std::string out;
    out.reserve(name.size());
    for (char c : name)
        out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
    return out;
}

struct SummaryRow {
    std::string venue;
    std::optional<std::int64_t> pc;
    std::optional<double> apgr, acgr, ac, mc, hcr, zcr;
    std::optional<int> h;
    std::optional<double> norm_h_value, mii, tcs, tjs, tcc, qqe_mean;
};

SummaryRow summarize_venue(const Corpus& corpus, const std::string& venue,
                           const RunConfig& config, std::span<const std::int64_t> mii_reference,
                           std::vector<std::string>& warnings) {
    SummaryRow row;
    row.venue = venue;

    const auto series = venue_year_series(corpus, venue);
    std::int64_t pc = 0;
    for (const auto& agg : series) pc += agg.n_t;
    row.pc = pc;

    try {
        const auto scale = scale_indicators(series);
        row.apgr = scale.apgr;
        row.acgr = scale.acgr;
    } catch (const Error& e) {
        warnings.push_back(venue + ": growth rates undefined (" + std::string(e.what()) + ")");
    }

    const auto vec = citation_vector(corpus, venue, WindowMode::cumulative);
    if (vec.empty()) {
        warnings.push_back(venue + ": no records; influence indicators undefined");
        return row;
    }

    const auto ct = central_and_tail(vec, config.hcr_threshold);
    row.ac = ct.ac;
    row.mc = ct.mc;
    row.hcr = ct.hcr;
    row.zcr = ct.zcr;

    const int h = h_index(vec);
    row.h = h;
    row.norm_h_value = norm_h(h, pc);
    row.mii = milestone_index(vec, config.mii_threshold, 0.001, config.mii_mode, mii_reference)
                  .mii_percent;

    try {
        const auto shares = prestige(corpus.venue_records(venue));
        row.tcs = shares.tcs;
        row.tjs = shares.tjs;
        row.tcc = shares.tcc;
    } catch (const Error& e) {
        if (e.code() != Errc::zero_citation_mass) throw;
        warnings.push_back(venue + ": zero citation mass; TCS/TJS undefined");
        std::size_t cited = 0;
        for (const PaperRecord* rec : corpus.venue_records(venue))
            if (rec->top_conf_citations >= 1) ++cited;
        row.tcc = 100.0 * static_cast<double>(cited) / static_cast<double>(vec.size());
    }

    try {
        const auto points = qqe_trajectory(corpus, venue, config.unit_band);
        double sum = 0.0;
        int defined = 0;
        for (const auto& pt : points) {
            if (!pt.qqe_magnitude) continue;
            sum += *pt.qqe_magnitude;
            ++defined;
        }
        if (defined > 0)
            row.qqe_mean = sum / defined;
        else
            warnings.push_back(venue + ": no defined elasticity years; QQE column empty");
    } catch (const Error& e) {
        warnings.push_back(venue + ": elasticity undefined (" + std::string(e.what()) + ")");
    }
    return row;
}

// Parsed cell of a reference trajectory table: either "-" or a number.
struct GoldenCell {
    bool defined = false;
    double value = 0.0;
};

GoldenCell parse_golden_cell(const std::string& cell, std::size_t row, const std::string& column) {
    GoldenCell out;
    if (cell == "-" || cell.empty()) return out;
    try {
        std::size_t consumed = 0;
        out.value = std::stod(cell, &consumed);
        if (consumed != cell.size()) throw std::invalid_argument(cell);
        out.defined = true;
    } catch (const std::exception&) {
        raise(Errc::schema_violation, "reference row " + std::to_string(row) + ", column " +
                                          column + ": '" + cell + "' is not numeric");
    }
    return out;
}

}  // namespace

std::string fixed(double value, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, value);
    std::string out(buf);
    // Avoid the confusing "-0.000": a value that rounds to zero has no sign.
    if (out.size() > 1 && out[0] == '-' &&
        out.find_first_not_of("0.", 1) == std::string::npos)
        out.erase(0, 1);
    return out;
}

void validate_config(const RunConfig& config) {
    if (config.window.start >= config.window.end)
        raise(Errc::bad_config, "window start must precede end");
    if (config.hcr_threshold <= 0 || config.mii_threshold <= 0)
        raise(Errc::bad_config, "thresholds must be positive");
    if (config.unit_band <= 0.0)
        raise(Errc::bad_config, "unit band must be positive");
    if (config.median_rule != "mean-of-middles")
        raise(Errc::bad_config, "unsupported median rule '" + config.median_rule + "'");
    if (config.output_formats.empty())
        raise(Errc::bad_config, "at least one output format is required");
    for (const auto& format : config.output_formats)
        if (format != "csv" && format != "json")
            raise(Errc::bad_config, "unknown output format '" + format + "'");
}

void apply_env_overrides(RunConfig& config) {
    if (const char* endpoint = std::getenv("VENUEPULSE_ENDPOINT"))
        config.primary_source.base_endpoint = endpoint;
    if (const char* key = std::getenv("VENUEPULSE_API_KEY"))
        config.primary_source.api_key = key;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::bad_config, "cannot open config file " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::bad_config, "config JSON parse error: " + std::string(e.what()));
    }
    if (!doc.is_object()) raise(Errc::bad_config, "config root must be a JSON object");

    RunConfig config;
    auto take_string = [&](const char* key, auto&& setter) {
        if (!doc.contains(key)) return;
        if (!doc[key].is_string())
            raise(Errc::bad_config, std::string("config '") + key + "' must be a string");
        setter(doc[key].template get<std::string>());
    };
    take_string("corpus", [&](std::string v) { config.corpus_path = v; });
    take_string("registry", [&](std::string v) { config.registry_path = v; });
    take_string("out_dir", [&](std::string v) { config.output_dir = v; });
    take_string("median_rule", [&](std::string v) { config.median_rule = std::move(v); });
    take_string("mii_mode", [&](std::string v) {
        if (v == "absolute_only")
            config.mii_mode = MilestoneMode::absolute_only;
        else if (v == "dual")
            config.mii_mode = MilestoneMode::dual;
        else
            raise(Errc::bad_config, "mii_mode must be absolute_only or dual, got '" + v + "'");
    });

    if (doc.contains("window")) {
        const auto& w = doc["window"];
        if (w.is_string()) {
            const std::string text = w.get<std::string>();
            const auto colon = text.find(':');
            try {
                if (colon == std::string::npos) throw std::invalid_argument(text);
                config.window.start = std::stoi(text.substr(0, colon));
                config.window.end = std::stoi(text.substr(colon + 1));
            } catch (const std::exception&) {
                raise(Errc::bad_config, "window must look like \"2014:2024\", got '" + text + "'");
            }
        } else if (w.is_object() && w.contains("start") && w.contains("end") &&
                   w["start"].is_number_integer() && w["end"].is_number_integer()) {
            config.window.start = w["start"].get<int>();
            config.window.end = w["end"].get<int>();
        } else {
            raise(Errc::bad_config, "window must be \"A:B\" or {\"start\":A,\"end\":B}");
        }
    }

    if (doc.contains("venues")) {
        if (!doc["venues"].is_array())
            raise(Errc::bad_config, "config 'venues' must be an array of strings");
        for (const auto& v : doc["venues"]) {
            if (!v.is_string())
                raise(Errc::bad_config, "config 'venues' must be an array of strings");
            config.venues.push_back(v.get<std::string>());
        }
    }
    if (doc.contains("formats")) {
        if (!doc["formats"].is_array())
            raise(Errc::bad_config, "config 'formats' must be an array");
        config.output_formats.clear();
        for (const auto& f : doc["formats"]) {
            if (!f.is_string()) raise(Errc::bad_config, "config 'formats' must hold strings");
            config.output_formats.push_back(f.get<std::string>());
        }
    }

    auto take_int = [&](const char* key, auto&& setter) {
        if (!doc.contains(key)) return;
        if (!doc[key].is_number_integer())
            raise(Errc::bad_config, std::string("config '") + key + "' must be an integer");
        setter(doc[key].template get<std::int64_t>());
    };
    take_int("hcr_threshold", [&](std::int64_t v) { config.hcr_threshold = v; });
    take_int("mii_threshold", [&](std::int64_t v) { config.mii_threshold = v; });
    if (doc.contains("unit_band")) {
        if (!doc["unit_band"].is_number())
            raise(Errc::bad_config, "config 'unit_band' must be a number");
        config.unit_band = doc["unit_band"].get<double>();
    }

    auto parse_source = [&](const nlohmann::json& s, SourceConfig& target, const char* which) {
        if (!s.is_object())
            raise(Errc::bad_config, std::string("config source '") + which + "' must be an object");
        if (s.contains("endpoint") && s["endpoint"].is_string())
            target.base_endpoint = s["endpoint"].get<std::string>();
        if (s.contains("api_key") && s["api_key"].is_string())
            target.api_key = s["api_key"].get<std::string>();
        if (s.contains("requests_per_second") && s["requests_per_second"].is_number())
            target.requests_per_second = s["requests_per_second"].get<double>();
        if (s.contains("max_attempts") && s["max_attempts"].is_number_integer())
            target.retry.max_attempts = s["max_attempts"].get<int>();
        if (s.contains("backoff_ms") && s["backoff_ms"].is_number_integer())
            target.retry.backoff_base =
                std::chrono::milliseconds(s["backoff_ms"].get<std::int64_t>());
        if (target.requests_per_second <= 0.0)
            raise(Errc::bad_config, "requests_per_second must be positive");
        if (target.retry.max_attempts < 1)
            raise(Errc::bad_config, "max_attempts must be at least 1");
    };
    if (doc.contains("sources")) {
        const auto& sources = doc["sources"];
        if (!sources.is_object()) raise(Errc::bad_config, "config 'sources' must be an object");
        if (sources.contains("primary"))
            parse_source(sources["primary"], config.primary_source, "primary");
        if (sources.contains("supplemental")) {
            parse_source(sources["supplemental"], config.supplemental_source, "supplemental");
            config.supplemental_source.priority = SourcePriority::supplemental;
        }
    }

    apply_env_overrides(config);
    validate_config(config);
    return config;
}

int cmd_summary(const RunConfig& config) {
    try {
        const Corpus corpus = load_corpus(config.corpus_path, config.window);
        const TopVenueRegistry registry = registry_for(config);

        std::vector<std::string> warnings;
        warnings.push_back(kQqeConvention);
        const auto venues = select_venues(config, corpus, registry, warnings);
        if (venues.empty()) {
            std::cerr << "error: no venues matched\n";
            return kExitUsage;
        }

        // Pooled all-venue cumulative distribution backs the dual milestone cut.
        std::vector<std::int64_t> pooled;
        if (config.mii_mode == MilestoneMode::dual) {
            for (const auto& rec : corpus.records()) pooled.push_back(rec.citation_count);
            std::sort(pooled.begin(), pooled.end());
        }

        std::vector<SummaryRow> rows;
        for (const auto& venue : venues)
            rows.push_back(summarize_venue(corpus, venue, config, pooled, warnings));

        std::filesystem::create_directories(config.output_dir);
        if (wants_format(config, "csv")) {
            std::string text = csv::join_row({"Conference", "PC", "APGR", "ACGR", "AC", "MC",
                                              "HCR", "ZCR", "H", "Norm-H", "MII", "TCS", "TJS",
                                              "TCC", "QQE"}) +
                               "\n";
            for (const auto& row : rows) {
                std::vector<std::string> cells{
                    row.venue,
                    row.pc ? std::to_string(*row.pc) : dash(),
                    opt_fixed(row.apgr, 2),
                    opt_fixed(row.acgr, 2),
                    opt_fixed(row.ac, 2),
                    opt_fixed(row.mc, 2),
                    opt_fixed(row.hcr, 2),
                    opt_fixed(row.zcr, 2),
                    row.h ? std::to_string(*row.h) : dash(),
                    opt_fixed(row.norm_h_value, 2),
                    opt_fixed(row.mii, 2),
                    opt_fixed(row.tcs, 2),
                    opt_fixed(row.tjs, 2),
                    opt_fixed(row.tcc, 2),
                    opt_fixed(row.qqe_mean, 2)};
                text += csv::join_row(cells) + "\n";
            }
            write_text_file(config.output_dir / "summary.csv", text);
        }
        if (wants_format(config, "json")) {
            nlohmann::ordered_json doc;
            doc["window"] = std::to_string(config.window.start) + ":" +
                            std::to_string(config.window.end);
            doc["hcr_threshold"] = config.hcr_threshold;
            doc["mii_threshold"] = config.mii_threshold;
            doc["mii_mode"] =
                config.mii_mode == MilestoneMode::dual ? "dual" : "absolute_only";
            doc["qqe_column"] = "mean of defined annual |QQE| magnitudes";
            doc["rows"] = nlohmann::ordered_json::array();
            for (const auto& row : rows) {
                nlohmann::ordered_json r;
                r["conference"] = row.venue;
                r["pc"] = row.pc ? nlohmann::ordered_json(*row.pc) : nullptr;
                r["apgr"] = opt_json(row.apgr);
                r["acgr"] = opt_json(row.acgr);
                r["ac"] = opt_json(row.ac);
                r["mc"] = opt_json(row.mc);
                r["hcr"] = opt_json(row.hcr);
                r["zcr"] = opt_json(row.zcr);
                r["h"] = row.h ? nlohmann::ordered_json(*row.h) : nullptr;
                r["norm_h"] = opt_json(row.norm_h_value);
                r["mii"] = opt_json(row.mii);
                r["tcs"] = opt_json(row.tcs);
                r["tjs"] = opt_json(row.tjs);
                r["tcc"] = opt_json(row.tcc);
                r["qqe"] = opt_json(row.qqe_mean);
                doc["rows"].push_back(std::move(r));
            }
            write_text_file(config.output_dir / "summary.json", doc.dump(2) + "\n");
        }
        write_warnings(config.output_dir / "summary.warnings", warnings);
        return kExitOk;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

int cmd_qqe(const RunConfig& config, const std::filesystem::path& golden) {
    try {
        const Corpus corpus = load_corpus(config.corpus_path, config.window);
        const TopVenueRegistry registry = registry_for(config);

        std::vector<std::string> warnings;
        const auto venues = select_venues(config, corpus, registry, warnings);
        if (venues.empty()) {
            std::cerr << "error: no venues matched\n";
            return kExitUsage;
        }

        struct Row {
            std::string venue;
            int year;
            std::int64_t n_t, c_t;
            std::optional<double> p_t, g_t, signed_qqe, s_t;
            std::string regime;
        };
        std::vector<Row> rows;
        for (const auto& venue : venues) {
            const auto series = venue_year_series(corpus, venue);
            rows.push_back({venue, series.front().year, series.front().n_t, series.front().c_t,
                            {}, {}, {}, {}, std::string(regime_name(QqeRegime::undefined))});
            for (const auto& pt : qqe_trajectory(series, config.unit_band))
                rows.push_back({pt.label, pt.year, pt.n_t, pt.c_t, pt.p_t, pt.g_t, pt.qqe_signed,
                                pt.s_t, std::string(regime_name(pt.regime))});
        }

        std::filesystem::create_directories(config.output_dir);
        if (wants_format(config, "csv")) {
            std::string text =
                csv::join_row({"Conference", "Year", "N_t", "C_t", "P_t", "g_t", "QQE",
                               "ln(P_t)"}) +
                "\n";
            for (const auto& row : rows)
                text += csv::join_row({row.venue, std::to_string(row.year),
                                       std::to_string(row.n_t), std::to_string(row.c_t),
                                       opt_fixed(row.p_t, 3), opt_fixed(row.g_t, 3),
                                       opt_fixed(row.signed_qqe, 3), opt_fixed(row.s_t, 3)}) +
                        "\n";
            write_text_file(config.output_dir / "qqe.csv", text);
        }
        if (wants_format(config, "json")) {
            nlohmann::ordered_json doc = nlohmann::ordered_json::array();
            for (const auto& row : rows) {
                nlohmann::ordered_json r;
                r["conference"] = row.venue;
                r["year"] = row.year;
                r["n_t"] = row.n_t;
                r["c_t"] = row.c_t;
                r["p_t"] = opt_json(row.p_t);
                r["g_t"] = opt_json(row.g_t);
                r["qqe"] = opt_json(row.signed_qqe);
                r["ln_p_t"] = opt_json(row.s_t);
                r["regime"] = row.regime;
                doc.push_back(std::move(r));
            }
            write_text_file(config.output_dir / "qqe.json", doc.dump(2) + "\n");
        }

        int exit_code = kExitOk;
        if (!golden.empty()) {
            std::ifstream in(golden, std::ios::binary);
            if (!in) raise(Errc::io_failure, "cannot open reference file " + golden.string());
            csv::Reader reader(in);
            const auto header = reader.next_row();
            if (!header)
                raise(Errc::schema_violation, "reference file " + golden.string() + " is empty");
            auto column_of = [&](const std::string& name) -> std::optional<std::size_t> {
                for (std::size_t i = 0; i < header->size(); ++i)
                    if ((*header)[i] == name) return i;
                return std::nullopt;
            };
            const char* needed[] = {"Conference", "Year", "N_t", "C_t",
                                    "P_t",        "g_t",  "QQE", "ln(P_t)"};
            std::map<std::string, std::size_t> col;
            for (const char* name : needed) {
                const auto idx = column_of(name);
                if (!idx)
                    raise(Errc::schema_violation,
                          "reference file lacks column '" + std::string(name) + "'");
                col[name] = *idx;
            }
            const auto flag_col = column_of("flag");

            std::map<std::pair<std::string, int>, const Row*> computed;
            for (const auto& row : rows) computed[{row.venue, row.year}] = &row;

            struct ColumnDiff {
                double max_dev = 0.0;
                std::size_t compared = 0;
            };
            std::map<std::string, ColumnDiff> diffs;
            std::vector<std::string> failures;
            std::size_t compared_rows = 0, flagged_rows = 0, row_number = 1;

            while (auto cells = reader.next_row()) {
                ++row_number;
                if (cells->size() < header->size())
                    raise(Errc::schema_violation,
                          "reference row " + std::to_string(row_number) + " is short");
                if (flag_col && !(*cells)[*flag_col].empty()) {
                    ++flagged_rows;
                    warnings.push_back("reference row " + std::to_string(row_number) + " (" +
                                       (*cells)[col["Conference"]] + " " +
                                       (*cells)[col["Year"]] + ") flagged '" +
                                       (*cells)[*flag_col] + "'; excluded from comparison");
                    continue;
                }
                const std::string venue = (*cells)[col["Conference"]];
                int year = 0;
                try {
                    year = std::stoi((*cells)[col["Year"]]);
                } catch (const std::exception&) {
                    raise(Errc::schema_violation, "reference row " + std::to_string(row_number) +
                                                      ": year '" + (*cells)[col["Year"]] +
                                                      "' is not an integer");
                }
                auto found = computed.find({venue, year});
                if (found == computed.end()) {
                    failures.push_back(venue + " " + std::to_string(year) +
                                       ": no computed row");
                    continue;
                }
                ++compared_rows;
                const Row& have = *found->second;
                if (std::to_string(have.n_t) != (*cells)[col["N_t"]] ||
                    std::to_string(have.c_t) != (*cells)[col["C_t"]])
                    failures.push_back(venue + " " + std::to_string(year) +
                                       ": N_t/C_t disagree with reference");
                const std::pair<const char*, const std::optional<double>*> checks[] = {
                    {"P_t", &have.p_t},
                    {"g_t", &have.g_t},
                    {"QQE", &have.signed_qqe},
                    {"ln(P_t)", &have.s_t}};
                for (const auto& [name, value] : checks) {
                    const auto want = parse_golden_cell((*cells)[col[name]], row_number, name);
                    if (want.defined != static_cast<bool>(*value)) {
                        failures.push_back(venue + " " + std::to_string(year) + " " + name +
                                           ": defined/undefined mismatch");
                        continue;
                    }
                    if (!want.defined) continue;
                    const double dev = std::fabs(**value - want.value);
                    auto& diff = diffs[name];
                    diff.max_dev = std::max(diff.max_dev, dev);
                    ++diff.compared;
                    if (dev > kGoldenTolerance + 1e-12)
                        failures.push_back(venue + " " + std::to_string(year) + " " + name +
                                           ": |" + fixed(**value, 6) + " - " +
                                           fixed(want.value, 6) + "| = " + fixed(dev, 6) +
                                           " > " + fixed(kGoldenTolerance, 3));
                }
            }

            std::cout << "reference comparison: " << compared_rows << " rows compared, "
                      << flagged_rows << " flagged rows excluded\n";
            for (const auto& [name, diff] : diffs)
                std::cout << "  max |dev| " << name << " = " << fixed(diff.max_dev, 6) << " over "
                          << diff.compared << " cells\n";
            for (const auto& failure : failures) std::cout << "  FAIL " << failure << "\n";
            if (!failures.empty()) exit_code = kExitGoldenDiff;
        }

        write_warnings(config.output_dir / "qqe.warnings", warnings);
        return exit_code;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

int cmd_correlate(const RunConfig& config, const std::filesystem::path& table) {
    try {
        std::vector<std::string> warnings;
        // category -> (x = paper counts, y = elasticity magnitudes)
        std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> series;

        if (!table.empty()) {
            std::ifstream in(table, std::ios::binary);
            if (!in) raise(Errc::io_failure, "cannot open table file " + table.string());
            csv::Reader reader(in);
            const auto header = reader.next_row();
            if (!header)
                raise(Errc::schema_violation, "table file " + table.string() + " is empty");
            std::map<std::string, std::size_t> col;
            for (std::size_t i = 0; i < header->size(); ++i) col[(*header)[i]] = i;
            for (const char* name : {"category", "year", "paper_count", "qqe"})
                if (!col.count(name))
                    raise(Errc::schema_violation,
                          "table file lacks column '" + std::string(name) + "'");
            std::size_t row_number = 1;
            while (auto cells = reader.next_row()) {
                ++row_number;
                if (cells->size() < header->size())
                    raise(Errc::schema_violation,
                          "table row " + std::to_string(row_number) + " is short");
                const std::string& qqe_cell = (*cells)[col["qqe"]];
                if (qqe_cell.empty() || qqe_cell == "-") continue;
                try {
                    const double count = std::stod((*cells)[col["paper_count"]]);
                    const double qqe = std::stod(qqe_cell);
                    auto& [xs, ys] = series[(*cells)[col["category"]]];
                    xs.push_back(count);
                    ys.push_back(qqe);
                } catch (const std::exception&) {
                    raise(Errc::schema_violation,
                          "table row " + std::to_string(row_number) + ": non-numeric cell");
                }
            }
        } else {
            const Corpus corpus = load_corpus(config.corpus_path, config.window);
            for (const auto& category : corpus.categories()) {
                auto& [xs, ys] = series[category];
                for (const auto& fy : field_qqe(corpus, category, FieldQqeMode::pooled)) {
                    if (!fy.qqe) continue;
                    xs.push_back(static_cast<double>(fy.n_t));
                    ys.push_back(*fy.qqe);
                }
            }
        }

        struct Row {
            std::string category;
            std::size_t n;
            double r, p;
            bool significant;
        };
        std::vector<Row> rows;
        for (const auto& [category, xy] : series) {
            const auto& [xs, ys] = xy;
            if (xs.size() < 3) {
                warnings.push_back("category '" + category + "': only " +
                                   std::to_string(xs.size()) +
                                   " usable year points (need 3); skipped");
                continue;
            }
            try {
                const auto res = spearman(xs, ys);
                rows.push_back({category, res.n, res.r, res.p_value, res.p_value <= 0.05});
            } catch (const Error& e) {
                if (e.code() != Errc::degenerate_input) throw;
                warnings.push_back("category '" + category + "': " + e.what() + "; skipped");
            }
        }

        std::filesystem::create_directories(config.output_dir);
        if (wants_format(config, "csv")) {
            std::string text = csv::join_row({"Category", "N", "R", "P", "Significant"}) + "\n";
            for (const auto& row : rows)
                text += csv::join_row({row.category, std::to_string(row.n), fixed(row.r, 3),
                                       fixed(row.p, 3), row.significant ? "yes" : "no"}) +
                        "\n";
            write_text_file(config.output_dir / "correlate.csv", text);
        }
        if (wants_format(config, "json")) {
            nlohmann::ordered_json doc = nlohmann::ordered_json::array();
            for (const auto& row : rows) {
                nlohmann::ordered_json r;
                r["category"] = row.category;
                r["n"] = row.n;
                r["r"] = row.r;
                r["p"] = row.p;
                r["significant"] = row.significant;
                doc.push_back(std::move(r));
            }
            write_text_file(config.output_dir / "correlate.json", doc.dump(2) + "\n");
        }
        write_warnings(config.output_dir / "correlate.warnings", warnings);
        return kExitOk;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

int cmd_plotdata(const RunConfig& config, std::string_view indicator, bool log_percentiles) {
    try {
        const TrajectoryIndicator ind = parse_indicator(indicator);
        const Corpus corpus = load_corpus(config.corpus_path, config.window);
        const TopVenueRegistry registry = registry_for(config);

        std::vector<std::string> warnings;
        const auto venues = select_venues(config, corpus, registry, warnings);
        if (venues.empty()) {
            std::cerr << "error: no venues matched\n";
            return kExitUsage;
        }

        std::filesystem::create_directories(config.output_dir);
        for (const auto& venue : venues) {
            const auto points =
                trajectory(corpus, venue, ind, config.hcr_threshold, config.mii_threshold);
            std::string text = csv::join_row({"Year", "Value"}) + "\n";
            for (const auto& pt : points)
                text += csv::join_row({std::to_string(pt.year), fixed(pt.value, 6)}) + "\n";
            const std::string stem =
                "plot_" + std::string(indicator_name(ind)) + "_" + sanitize_filename(venue);
            write_text_file(config.output_dir / (stem + ".csv"), text);

            if (log_percentiles) {
                std::string pct_text =
                    csv::join_row({"Year", "P5", "P25", "P50", "P75", "P95"}) + "\n";
                for (int year = corpus.window().start; year <= corpus.window().end; ++year) {
                    const auto vec =
                        citation_vector(corpus, venue, WindowMode::single_year, year);
                    if (vec.empty()) continue;
                    std::vector<double> logs;
                    logs.reserve(vec.size());
                    for (std::int64_t c : vec)
                        logs.push_back(std::log10(1.0 + static_cast<double>(c)));
                    std::vector<std::string> cells{std::to_string(year)};
                    for (double q : {0.05, 0.25, 0.50, 0.75, 0.95})
                        cells.push_back(fixed(quantile_linear(logs, q), 6));
                    pct_text += csv::join_row(cells) + "\n";
                }
                write_text_file(config.output_dir /
                                    ("plot_log10pct_" + sanitize_filename(venue) + ".csv"),
                                pct_text);
            }
        }
        write_warnings(config.output_dir / "plotdata.warnings", warnings);
        return kExitOk;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

int cmd_ingest(const RunConfig& config, const std::filesystem::path& queries_path) {
    try {
        std::ifstream in(queries_path, std::ios::binary);
        if (!in) raise(Errc::io_failure, "cannot open queries file " + queries_path.string());
        csv::Reader reader(in);
        const auto header = reader.next_row();
        if (!header)
            raise(Errc::schema_violation, "queries file " + queries_path.string() + " is empty");
        std::map<std::string, std::size_t> col;
        for (std::size_t i = 0; i < header->size(); ++i) col[(*header)[i]] = i;
        for (const char* name : {"title", "venue", "year"})
            if (!col.count(name))
                raise(Errc::schema_violation,
                      "queries file lacks column '" + std::string(name) + "'");

        std::vector<FetchQuery> queries;
        std::size_t row_number = 1;
        while (auto cells = reader.next_row()) {
            ++row_number;
            if (cells->size() < header->size())
                raise(Errc::schema_violation,
                      "queries row " + std::to_string(row_number) + " is short");
            FetchQuery q;
            q.title = (*cells)[col["title"]];
            q.venue = (*cells)[col["venue"]];
            try {
                q.year = std::stoi((*cells)[col["year"]]);
            } catch (const std::exception&) {
                raise(Errc::schema_violation, "queries row " + std::to_string(row_number) +
                                                  ": year '" + (*cells)[col["year"]] +
                                                  "' is not an integer");
            }
            queries.push_back(std::move(q));
        }
        if (queries.empty()) raise(Errc::schema_violation, "queries file has no rows");
        if (config.primary_source.base_endpoint.empty())
            raise(Errc::bad_config, "no primary source endpoint configured");

        std::vector<std::string> warnings;
        const auto primary_outcomes = fetch_batch(config.primary_source, queries);

        std::vector<FetchQuery> residual;
        for (const auto& out : primary_outcomes) {
            if (out.status == FetchStatus::row) continue;
            residual.push_back(out.query);
            if (out.status == FetchStatus::error)
                warnings.push_back("primary source failed for '" + out.query.title +
                                   "': " + errc_name(out.error_code) + " " + out.message);
        }
        std::vector<FetchOutcome> supplemental_outcomes;
        if (!residual.empty() && !config.supplemental_source.base_endpoint.empty())
            supplemental_outcomes = fetch_batch(config.supplemental_source, residual);

        // Match results back to their queries and validate.
        auto row_for = [](const std::vector<FetchOutcome>& outcomes, const FetchQuery& q)
            -> const FetchOutcome* {
            for (const auto& out : outcomes)
                if (out.query.title == q.title && out.query.venue == q.venue &&
                    out.query.year == q.year)
                    return &out;
            return nullptr;
        };

        std::size_t matched_primary = 0, matched_supplemental = 0, unmatched = 0, retried = 0;
        std::vector<PaperRecord> records;
        for (const auto& query : queries) {
            const FetchOutcome* primary = row_for(primary_outcomes, query);
            const FetchOutcome* supplemental = row_for(supplemental_outcomes, query);
            if (primary && primary->attempts > 1) ++retried;

            std::optional<RawRecord> raw;
            if (primary && primary->status == FetchStatus::row) {
                ++matched_primary;
                raw = primary->row;
                if (supplemental && supplemental->status == FetchStatus::row)
                    raw = consolidate(*raw, supplemental->row);
            } else if (supplemental && supplemental->status == FetchStatus::row) {
                ++matched_supplemental;
                raw = supplemental->row;
            } else {
                ++unmatched;
                warnings.push_back("no source matched '" + query.title + "' (" + query.venue +
                                   " " + std::to_string(query.year) + ")");
                continue;
            }

            // The fetched row must agree with the query's constraints.
            const auto match = match_title(query.title, query.venue, query.year, {*raw});
            if (!match.matched) {
                ++unmatched;
                warnings.push_back("fetched row does not match query constraints for '" +
                                   query.title + "'");
                continue;
            }
            std::vector<ValidationIssue> issues;
            auto record = validate_record(*raw, config.window, issues);
            if (!record) {
                warnings.push_back("row for '" + query.title + "' failed validation: " +
                                   issues.front().field + ": " + issues.front().message);
                continue;
            }
            records.push_back(std::move(*record));
        }

        auto dedup = deduplicate(std::move(records));
        for (const auto& dup : dedup.duplicates) {
            std::string ids;
            for (const auto& id : dup.removed_ids) ids += (ids.empty() ? "" : ", ") + id;
            warnings.push_back("duplicate key " + dup.key + ": kept " + dup.survivor_id +
                               ", removed " + ids);
        }

        std::filesystem::create_directories(config.output_dir);
        const auto corpus = Corpus::build(std::move(dedup.records), config.window);
        const auto out_path = config.output_dir / "ingested.csv";
        const auto bytes = persist_corpus(corpus, out_path, CorpusFormat::csv);

        std::cout << "queries: " << queries.size() << "\n"
                  << "matched by primary source: " << matched_primary << "\n"
                  << "matched by supplemental source: " << matched_supplemental << "\n"
                  << "unmatched: " << unmatched << "\n"
                  << "queries needing retries: " << retried << "\n"
                  << "records after dedup: " << corpus.records().size() << "\n"
                  << "wrote " << bytes << " bytes to " << out_path.string() << "\n";
        write_warnings(config.output_dir / "ingested.warnings", warnings);
        return kExitOk;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

}  // namespace venuepulse
