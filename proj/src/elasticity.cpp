#include "venuepulse/elasticity.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "venuepulse/errors.hpp"

namespace venuepulse {

std::string_view regime_name(QqeRegime regime) {
    switch (regime) {
        case QqeRegime::efficient_expansion: return "EfficientExpansion";
        case QqeRegime::quality_concentrating_contraction:
            return "QualityConcentratingContraction";
        case QqeRegime::unitary: return "Unitary";
        case QqeRegime::impact_dilution: return "ImpactDilution";
        case QqeRegime::malignant_contraction: return "MalignantContraction";
        case QqeRegime::undefined: return "Undefined";
    }
    return "?";
}

QqePoint qqe_point(std::int64_t n_t, std::int64_t n_prev, std::int64_t c_t, std::int64_t c_prev,
                   double unit_band) {
    QqePoint pt;
    pt.n_t = n_t;
    pt.n_prev = n_prev;
    pt.c_t = c_t;
    pt.c_prev = c_prev;

    if (n_prev > 0) pt.p_t = static_cast<double>(n_t) / static_cast<double>(n_prev);
    if (c_prev > 0) pt.g_t = static_cast<double>(c_t) / static_cast<double>(c_prev);
    if (pt.p_t && *pt.p_t > 0.0) pt.s_t = std::log(*pt.p_t);
    if (n_t > 0 && pt.p_t && pt.g_t) {
        pt.qqe_magnitude = *pt.g_t / *pt.p_t;
        pt.qqe_signed = *pt.p_t >= 1.0 ? *pt.qqe_magnitude : -*pt.qqe_magnitude;
        pt.regime = classify_regime(pt, unit_band);
    }
    return pt;
}

QqeRegime classify_regime(const QqePoint& point, double unit_band) {
    if (!point.qqe_magnitude)
        raise(Errc::undefined_point,
              "no elasticity regime for " + point.label + " " + std::to_string(point.year) +
                  ": a defining denominator is zero");
    const double m = *point.qqe_magnitude;
    if (std::fabs(m - 1.0) <= unit_band) return QqeRegime::unitary;
    const bool expanding = *point.s_t >= 0.0;  // s_t exists whenever the magnitude does
    if (m > 1.0)
        return expanding ? QqeRegime::efficient_expansion
                         : QqeRegime::quality_concentrating_contraction;
    return expanding ? QqeRegime::impact_dilution : QqeRegime::malignant_contraction;
}

std::vector<QqePoint> qqe_trajectory(std::span<const VenueYearAggregate> per_year,
                                     double unit_band) {
    if (per_year.size() < 2)
        raise(Errc::insufficient_years, "elasticity trajectory needs at least two years, got " +
                                            std::to_string(per_year.size()));
    std::vector<QqePoint> points;
    points.reserve(per_year.size() - 1);
    for (std::size_t i = 1; i < per_year.size(); ++i) {
        const auto& prev = per_year[i - 1];
        const auto& cur = per_year[i];
        QqePoint pt = qqe_point(cur.n_t, prev.n_t, cur.c_t, prev.c_t, unit_band);
        pt.label = cur.venue;
        pt.year = cur.year;
        points.push_back(std::move(pt));
    }
    return points;
}

std::vector<QqePoint> qqe_trajectory(const Corpus& corpus, std::string_view venue,
                                     double unit_band) {
    const auto series = venue_year_series(corpus, venue);
    return qqe_trajectory(series, unit_band);
}

namespace {

struct YearSlice {
    std::int64_t n_t = 0;
    std::int64_t c_t = 0;
};

// Pooled per-year counts and citation mass of one category, optionally
// restricted to a single venue.
std::map<int, YearSlice> category_slices(const Corpus& corpus, std::string_view category,
                                         std::string_view venue) {
    std::map<int, YearSlice> by_year;
    for (int year = corpus.window().start; year <= corpus.window().end; ++year)
        by_year[year] = {};
    for (const auto& rec : corpus.records()) {
        if (!rec.ai_category || *rec.ai_category != category) continue;
        if (!venue.empty() && rec.venue != venue) continue;
        by_year[rec.year].n_t += 1;
        for (auto& [year, slice] : by_year)
            if (rec.year <= year) slice.c_t += rec.annual(year);
    }
    return by_year;
}

}  // namespace

std::vector<FieldYear> field_qqe(const Corpus& corpus, std::string_view category,
                                 FieldQqeMode mode) {
    const auto known = corpus.categories();
    if (!std::binary_search(known.begin(), known.end(), std::string(category)))
        raise(Errc::unknown_category, "no records carry category '" + std::string(category) + "'");
    if (corpus.window().span() < 2)
        raise(Errc::insufficient_years, "field elasticity needs a window of at least two years");

    const auto pooled = category_slices(corpus, category, {});

    // venue_averaged: per-venue magnitude series, averaged where defined.
    std::map<int, std::pair<double, int>> venue_avg;  // year -> (sum, count)
    if (mode == FieldQqeMode::venue_averaged) {
        for (const auto& venue : corpus.venues()) {
            const auto slices = category_slices(corpus, category, venue);
            for (auto it = std::next(slices.begin()); it != slices.end(); ++it) {
                const auto& prev = std::prev(it)->second;
                const auto& cur = it->second;
                const QqePoint pt = qqe_point(cur.n_t, prev.n_t, cur.c_t, prev.c_t);
                if (pt.qqe_magnitude) {
                    auto& [sum, count] = venue_avg[it->first];
                    sum += *pt.qqe_magnitude;
                    ++count;
                }
            }
        }
    }

    std::vector<FieldYear> out;
    for (auto it = std::next(pooled.begin()); it != pooled.end(); ++it) {
        FieldYear fy;
        fy.year = it->first;
        fy.n_t = it->second.n_t;
        fy.c_t = it->second.c_t;
        if (mode == FieldQqeMode::pooled) {
            const auto& prev = std::prev(it)->second;
            const QqePoint pt = qqe_point(fy.n_t, prev.n_t, fy.c_t, prev.c_t);
            fy.qqe = pt.qqe_magnitude;
        } else {
            auto found = venue_avg.find(fy.year);
            if (found != venue_avg.end() && found->second.second > 0)
                fy.qqe = found->second.first / static_cast<double>(found->second.second);
        }
        out.push_back(fy);
    }
    return out;
}

}  // namespace venuepulse
