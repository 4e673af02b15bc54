#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "venuepulse/errors.hpp"
#include "venuepulse/stats.hpp"

using namespace venuepulse;
using doctest::Approx;

namespace {
bool near(double actual, double expected, double abs_tol) {
    return std::fabs(actual - expected) <= abs_tol;
}
}  // namespace

TEST_CASE("rank assigns 1..n with average ties") {
    CHECK(rank(std::vector<double>{5, 1, 3}) == std::vector<double>{3, 1, 2});
    CHECK(rank(std::vector<double>{2, 2, 7}) == std::vector<double>{1.5, 1.5, 3});
    CHECK(rank(std::vector<double>{1, 1, 1}) == std::vector<double>{2, 2, 2});
    CHECK(rank(std::vector<double>{4}) == std::vector<double>{1});
}

TEST_CASE("rank agrees with sort-index brute force when untied") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> value(0.0, 1.0);
    for (int iter = 0; iter < 200; ++iter) {
        std::vector<double> v(10);
        for (auto& x : v) x = value(rng);  // ties have probability ~0
        const auto r = rank(v);
        std::vector<std::size_t> order(v.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        for (std::size_t pos = 0; pos < order.size(); ++pos)
            CHECK(r[order[pos]] == static_cast<double>(pos + 1));
    }
}

// Two ten-point series with their reference r/p values (frozen from an
// independent statistics package at double precision).
TEST_CASE("spearman matches frozen reference values at n=10") {
    const std::vector<double> x1{319, 385, 457, 574, 787, 840, 953, 1082, 1273, 1443};
    const std::vector<double> y1{5.74, 3.68, 2.28, 1.44, 1.15, 1.63, 1.14, 1.26, 1.09, 0.93};
    const auto a = spearman(x1, y1);
    CHECK(a.r == Approx(-0.915151515).epsilon(1e-9));
    CHECK(near(a.p_value, 0.000204472, 1e-8));
    CHECK(a.n == 10);
    CHECK_FALSE(a.tie_adjusted);

    const std::vector<double> x2{100, 164, 207, 392, 473, 643, 779, 900, 1157, 1798};
    const std::vector<double> y2{9.96, 2.03, 2.39, 1.06, 1.69, 3.64, 1.27, 1.30, 1.01, 1.21};
    const auto b = spearman(x2, y2);
    CHECK(b.r == Approx(-0.672727273).epsilon(1e-9));
    CHECK(near(b.p_value, 0.033041223, 1e-8));
}

TEST_CASE("perfect monotonicity gives |r|=1 and p=0") {
    const std::vector<double> x{1, 2, 3, 4, 5};
    const std::vector<double> up{10, 20, 30, 40, 50};
    const std::vector<double> down{5, 4, 3, 2, 1};
    CHECK(spearman(x, up).r == Approx(1.0));
    CHECK(spearman(x, up).p_value == 0.0);
    CHECK(spearman(x, down).r == Approx(-1.0));
    CHECK(spearman(x, down).p_value == 0.0);
}

TEST_CASE("spearman input validation") {
    const std::vector<double> x{1, 2, 3};
    const std::vector<double> y{1, 2};
    CHECK_THROWS_AS(spearman(x, y), Error);
    CHECK_THROWS_AS(spearman(std::vector<double>{1, 2}, std::vector<double>{3, 4}), Error);
    CHECK_THROWS_AS(spearman(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), Error);
}

TEST_CASE("spearman r properties on random inputs") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> value(-5.0, 5.0);
    for (int iter = 0; iter < 100; ++iter) {
        std::vector<double> x(8), y(8);
        for (auto& v : x) v = value(rng);
        for (auto& v : y) v = value(rng);

        const auto base = spearman(x, y);
        CHECK(std::fabs(base.r) <= 1.0 + 1e-12);
        CHECK(base.p_value >= 0.0);
        CHECK(base.p_value <= 1.0);

        // Symmetry in the arguments.
        CHECK(spearman(y, x).r == Approx(base.r).epsilon(1e-12));

        // Invariance under a strictly increasing transform of x.
        std::vector<double> tx(x.size());
        std::transform(x.begin(), x.end(), tx.begin(),
                       [](double v) { return std::exp(v / 3.0) + 2.0 * v; });
        CHECK(spearman(tx, y).r == Approx(base.r).epsilon(1e-12));

        // Negating y negates r and keeps p.
        std::vector<double> ny(y.size());
        std::transform(y.begin(), y.end(), ny.begin(), [](double v) { return -v; });
        const auto neg = spearman(x, ny);
        CHECK(neg.r == Approx(-base.r).epsilon(1e-12));
        CHECK(neg.p_value == Approx(base.p_value).epsilon(1e-9));
    }
}

TEST_CASE("tie adjustment switches to rank-vector correlation") {
    const std::vector<double> x{1, 1, 2, 3};
    const std::vector<double> y{2, 1, 3, 4};
    const auto res = spearman(x, y);
    CHECK(res.tie_adjusted);
    CHECK(res.r == Approx(0.9486832980505137).epsilon(1e-12));
}

// Frozen two-sided tails 2*P(T>t) from an independent statistics package.
TEST_CASE("student t upper tail matches frozen references to 1e-10") {
    struct Case {
        int df;
        double t;
        double two_sided;
    };
    const Case cases[] = {
        {1, 1.0, 0.500000000000},        {1, 12.706204736, 0.050000000001},
        {2, 1.0, 0.422649730810},        {2, 4.302652730, 0.049999999995},
        {3, 1.29904, 0.284756409487},    {5, 2.570581836, 0.049999999978},
        {8, 2.306004135, 0.050000000016},{8, 6.421722, 0.000204353139},
        {8, 1.443375, 0.186904994040},   {10, 2.228138852, 0.049999999999},
        {30, 2.042272456, 0.050000000032},{8, 8.329657, 0.000032616059},
    };
    for (const auto& c : cases)
        CHECK(near(2.0 * student_t_sf(c.t, c.df), c.two_sided, 1e-10));

    // Symmetry: P(T > -t) = 1 - P(T > t).
    CHECK(near(student_t_sf(-1.5, 7), 1.0 - student_t_sf(1.5, 7), 1e-12));
}

TEST_CASE("regularized incomplete beta basics") {
    CHECK(near(regularized_incomplete_beta(0.5, 0.5, 0.5), 0.5, 1e-12));
    CHECK(regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0);
    CHECK(regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0);
    // I_x(1,1) = x.
    CHECK(near(regularized_incomplete_beta(1.0, 1.0, 0.25), 0.25, 1e-12));
    CHECK_THROWS_AS(regularized_incomplete_beta(0.0, 1.0, 0.5), Error);
}

// Frozen inclusive two-sided permutation p-values.
TEST_CASE("exact permutation p matches frozen references") {
    const std::vector<double> x5{1, 2, 3, 4, 5};
    CHECK(spearman_exact_p(x5, std::vector<double>{1, 2, 3, 5, 4}) ==
          Approx(0.08333333333333333).epsilon(1e-12));
    CHECK(spearman_exact_p(x5, std::vector<double>{2, 1, 3, 4, 5}) ==
          Approx(0.08333333333333333).epsilon(1e-12));
    CHECK(spearman_exact_p(x5, std::vector<double>{3, 1, 2, 5, 4}) ==
          Approx(0.35).epsilon(1e-12));
    CHECK(spearman_exact_p(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 2, 4, 3}) ==
          Approx(1.0 / 3.0).epsilon(1e-12));
    // Ties enumerate the distinct arrangements of the rank multiset.
    CHECK(spearman_exact_p(std::vector<double>{1, 1, 2, 3}, std::vector<double>{2, 1, 3, 4}) ==
          Approx(1.0 / 6.0).epsilon(1e-12));
    // Perfect correlation is the most extreme arrangement: p = 2/n!.
    CHECK(spearman_exact_p(x5, x5) == Approx(2.0 / 120.0).epsilon(1e-12));

    CHECK_THROWS_AS(
        spearman_exact_p(std::vector<double>(11, 0.0), std::vector<double>(11, 0.0)), Error);
}

TEST_CASE("linear-interpolation quantiles match the fixture oracle") {
    std::vector<double> v{3, 1, 4, 1, 5, 9, 2, 6};
    std::sort(v.begin(), v.end());
    CHECK(near(quantile_linear(v, 0.05), 1.0, 1e-10));
    CHECK(near(quantile_linear(v, 0.25), 1.75, 1e-10));
    CHECK(near(quantile_linear(v, 0.50), 3.5, 1e-10));
    CHECK(near(quantile_linear(v, 0.75), 5.25, 1e-10));
    CHECK(near(quantile_linear(v, 0.95), 7.95, 1e-10));

    std::vector<double> big(1000);
    std::iota(big.begin(), big.end(), 1.0);
    CHECK(near(quantile_linear(big, 0.999), 999.001, 1e-9));

    CHECK(quantile_linear(std::vector<double>{42.0}, 0.5) == 42.0);
    CHECK_THROWS_AS(quantile_linear(std::vector<double>{}, 0.5), Error);
    CHECK_THROWS_AS(quantile_linear(v, 1.5), Error);
}
