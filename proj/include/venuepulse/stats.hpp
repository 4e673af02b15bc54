#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace venuepulse {

// Ranks 1..n with tied values receiving the average of the ranks they cover,
// e.g. [5,1,3] -> [3,1,2] and [2,2,7] -> [1.5,1.5,3].
std::vector<double> rank(std::span<const double> values);

struct SpearmanResult {
    double r = 0.0;
    double p_value = 1.0;  // two-sided
    std::size_t n = 0;
    bool tie_adjusted = false;  // Pearson-on-ranks path was required
};

// Spearman rank correlation. Without ties r = 1 - 6*sum(d^2)/(n(n^2-1));
// with ties r is the Pearson correlation of the rank vectors. The p-value is
// the two-sided tail of t = r*sqrt((n-2)/(1-r^2)) with n-2 degrees of
// freedom; |r| = 1 reports p = 0.
// Throws Error(length_mismatch) when sizes differ or n < 3 and
// Error(degenerate_input) when either input is constant.
SpearmanResult spearman(std::span<const double> x, std::span<const double> y);

// Exact two-sided permutation p-value, P(|r'| >= |r_observed|) over all
// distinct arrangements of the y-ranks. Only feasible for small samples;
// throws Error(length_mismatch) when n > 10 (10! arrangements) or n < 3.
double spearman_exact_p(std::span<const double> x, std::span<const double> y);

// Upper tail P(T > t) of Student's t distribution with df > 0, evaluated via
// the regularized incomplete beta function (absolute accuracy ~1e-10).
double student_t_sf(double t, int df);

// Regularized incomplete beta I_x(a, b) for a,b > 0 and x in [0,1],
// continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

// Linear-interpolation quantile over a sorted non-decreasing vector: with
// h = (n-1)*q, returns v[floor(h)] + (h - floor(h))*(v[floor(h)+1] - v[floor(h)]).
// Throws Error(degenerate_input) on empty input or q outside [0,1].
double quantile_linear(std::span<const double> sorted_values, double q);

}  // namespace venuepulse
