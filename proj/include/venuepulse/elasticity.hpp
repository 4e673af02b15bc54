#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "venuepulse/corpus.hpp"

namespace venuepulse {

// Joint classification of elasticity magnitude and scale direction.
enum class QqeRegime {
    efficient_expansion,                // |QQE| > 1 while growing
    quality_concentrating_contraction,  // |QQE| > 1 while shrinking
    unitary,                            // |QQE| within the unit band
    impact_dilution,                    // |QQE| < 1 while growing
    malignant_contraction,              // |QQE| < 1 while shrinking
    undefined,                          // a required denominator was zero
};

std::string_view regime_name(QqeRegime regime);

// One year-over-year elasticity observation. Optional fields are absent
// exactly when their defining ratio has a zero denominator:
//   p_t needs n_prev > 0; g_t needs c_prev > 0;
//   the magnitude needs n_t > 0, n_prev > 0 and c_prev > 0;
//   s_t = ln(p_t) needs p_t > 0.
struct QqePoint {
    std::string label;  // venue or category
    int year = 0;
    std::int64_t n_t = 0;
    std::int64_t n_prev = 0;
    std::int64_t c_t = 0;
    std::int64_t c_prev = 0;
    std::optional<double> p_t;            // N_t / N_{t-1}
    std::optional<double> g_t;            // C_t / C_{t-1}
    std::optional<double> s_t;            // ln(p_t)
    std::optional<double> qqe_magnitude;  // g_t / p_t
    std::optional<double> qqe_signed;     // +magnitude when p_t >= 1, else -magnitude
    QqeRegime regime = QqeRegime::undefined;
};

constexpr double kDefaultUnitBand = 0.01;

// Computes all ratios and the regime for one consecutive-year step.
// Zero denominators yield absent fields and the undefined regime, never an
// error (biennial gap years must not abort a trajectory).
QqePoint qqe_point(std::int64_t n_t, std::int64_t n_prev, std::int64_t c_t, std::int64_t c_prev,
                   double unit_band = kDefaultUnitBand);

// Regime for a defined point: within the unit band -> unitary; otherwise the
// magnitude side (>1 or <1) is crossed with the scale direction (s_t >= 0
// counts as expansion, matching the sign convention of qqe_signed).
// Throws Error(undefined_point) when the point's magnitude is absent.
QqeRegime classify_regime(const QqePoint& point, double unit_band = kDefaultUnitBand);

// One point per consecutive-year step of an ascending year series (the first
// series year has no predecessor and yields no point).
// Throws Error(insufficient_years) when fewer than two aggregates are given.
std::vector<QqePoint> qqe_trajectory(std::span<const VenueYearAggregate> per_year,
                                     double unit_band = kDefaultUnitBand);

// Same, over the corpus aggregates of one venue across the full window.
std::vector<QqePoint> qqe_trajectory(const Corpus& corpus, std::string_view venue,
                                     double unit_band = kDefaultUnitBand);

enum class FieldQqeMode {
    pooled,          // category-wide N_t / C_t across all venues
    venue_averaged,  // mean of the defined per-venue magnitudes
};

struct FieldYear {
    int year = 0;
    std::int64_t n_t = 0;  // pooled category paper count
    std::int64_t c_t = 0;  // pooled category citation mass
    std::optional<double> qqe;  // magnitude under the chosen mode
};

// Per-year elasticity of one ai_category across the corpus, from the second
// window year on. Throws Error(unknown_category) when no record carries the
// category and Error(insufficient_years) for windows shorter than two years.
std::vector<FieldYear> field_qqe(const Corpus& corpus, std::string_view category,
                                 FieldQqeMode mode = FieldQqeMode::pooled);

}  // namespace venuepulse
