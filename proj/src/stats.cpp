#include "venuepulse/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "venuepulse/errors.hpp"

namespace venuepulse {

namespace {

// Continued-fraction kernel for the regularized incomplete beta (modified
// Lentz algorithm). Converges quickly when x < (a+1)/(a+b+2).
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 1e-15;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

bool has_ties(std::span<const double> ranks) {
    // Average ranks are integral exactly when no value is tied.
    for (double r : ranks)
        if (r != std::floor(r)) return true;
    // Integral average ranks can still hide ties ([1,1,1] -> ranks 2,2,2),
    // so check for duplicates as well.
    std::vector<double> sorted(ranks.begin(), ranks.end());
    std::sort(sorted.begin(), sorted.end());
    return std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
}

double pearson(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        raise(Errc::degenerate_input, "constant input has no rank correlation");
    return sxy / std::sqrt(sxx * syy);
}

void check_pair_sizes(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        raise(Errc::length_mismatch, "series lengths differ (" + std::to_string(x.size()) +
                                         " vs " + std::to_string(y.size()) + ")");
    if (x.size() < 3)
        raise(Errc::length_mismatch,
              "need at least 3 paired observations, got " + std::to_string(x.size()));
}

double spearman_r(std::span<const double> x, std::span<const double> y, bool* tie_adjusted) {
    const std::vector<double> rx = rank(x);
    const std::vector<double> ry = rank(y);
    const bool tied = has_ties(rx) || has_ties(ry);
    if (tie_adjusted) *tie_adjusted = tied;
    if (tied) return pearson(rx, ry);

    // Untied ranks: the classic closed form is exact (integer d^2 sum).
    const std::size_t n = x.size();
    std::int64_t d2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto d = static_cast<std::int64_t>(rx[i]) - static_cast<std::int64_t>(ry[i]);
        d2 += d * d;
    }
    const auto nn = static_cast<double>(n);
    return 1.0 - 6.0 * static_cast<double>(d2) / (nn * (nn * nn - 1.0));
}

}  // namespace

std::vector<double> rank(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        // Positions i..j (0-based) share ranks i+1..j+1; assign the average.
        const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

SpearmanResult spearman(std::span<const double> x, std::span<const double> y) {
    check_pair_sizes(x, y);
    SpearmanResult res;
    res.n = x.size();
    res.r = spearman_r(x, y, &res.tie_adjusted);

    constexpr double kPerfect = 1.0 - 1e-12;
    if (std::fabs(res.r) >= kPerfect) {
        res.p_value = 0.0;
        return res;
    }
    const auto df = static_cast<double>(res.n - 2);
    const double t = res.r * std::sqrt(df / (1.0 - res.r * res.r));
    res.p_value = std::clamp(2.0 * student_t_sf(std::fabs(t), static_cast<int>(res.n) - 2),
                             0.0, 1.0);
    return res;
}

double spearman_exact_p(std::span<const double> x, std::span<const double> y) {
    check_pair_sizes(x, y);
    if (x.size() > 10)
        raise(Errc::length_mismatch,
              "exact permutation p limited to n <= 10, got " + std::to_string(x.size()));

    const std::vector<double> rx = rank(x);
    std::vector<double> ry = rank(y);

    bool ignored = false;
    const double r_obs = std::fabs(spearman_r(x, y, &ignored));

    // Enumerating the distinct arrangements of the y-rank multiset samples
    // the null uniformly even in the presence of ties.
    std::sort(ry.begin(), ry.end());
    std::size_t total = 0;
    std::size_t at_least = 0;
    const double tol = 1e-12;
    do {
        const double r = pearson(rx, ry);
        ++total;
        if (std::fabs(r) >= r_obs - tol) ++at_least;
    } while (std::next_permutation(ry.begin(), ry.end()));

    return static_cast<double>(at_least) / static_cast<double>(total);
}

double regularized_incomplete_beta(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0)
        raise(Errc::degenerate_input, "incomplete beta requires a, b > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;

    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double quantile_linear(std::span<const double> sorted_values, double q) {
    if (sorted_values.empty())
        raise(Errc::degenerate_input, "quantile of an empty vector is undefined");
    if (q < 0.0 || q > 1.0)
        raise(Errc::degenerate_input, "quantile level must lie in [0,1]");
    const std::size_t n = sorted_values.size();
    if (n == 1) return sorted_values[0];
    const double h = static_cast<double>(n - 1) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= n) return sorted_values[n - 1];
    const double frac = h - std::floor(h);
    return sorted_values[lo] + frac * (sorted_values[lo + 1] - sorted_values[lo]);
}

double student_t_sf(double t, int df) {
    if (df <= 0) raise(Errc::degenerate_input, "degrees of freedom must be positive");
    if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
    const double v = static_cast<double>(df);
    const double x = v / (v + t * t);
    const double tail = 0.5 * regularized_incomplete_beta(v / 2.0, 0.5, x);
    return t >= 0.0 ? tail : 1.0 - tail;
}

}  // namespace venuepulse
