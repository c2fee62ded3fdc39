#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "roofsim/error.hpp"
#include "roofsim/metrics.hpp"
#include "roofsim/rng.hpp"
#include "test_support.hpp"

using namespace roofsim;

namespace {

// Straight transcription of the definition: O(n^2) selection of the next
// largest prediction, lowest index first among ties.
double reference_raw_gini(const std::vector<double>& y, const std::vector<double>& y_hat) {
    const std::size_t n = y.size();
    std::vector<bool> used(n, false);
    const double total = std::accumulate(y.begin(), y.end(), 0.0);
    double c = 0.0;
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t best = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (!used[i] && (best == n || y_hat[i] > y_hat[best])) {
                best = i;
            }
        }
        used[best] = true;
        c += y[best];
        acc += c / total;
    }
    return acc / static_cast<double>(n) - static_cast<double>(n + 1) / (2.0 * static_cast<double>(n));
}

std::vector<double> random_losses(Rng& rng, std::size_t n) {
    std::vector<double> y(n);
    for (auto& v : y) {
        v = rng.uniform() < 0.7 ? 0.0 : 1000.0 * rng.uniform();
    }
    y[0] = 1.0 + y[0];
    return y;
}

std::vector<double> random_scores(Rng& rng, std::size_t n, int levels = 0) {
    std::vector<double> s(n);
    for (auto& v : s) {
        v = levels > 0 ? static_cast<double>(rng.below(static_cast<std::uint64_t>(levels))) : rng.uniform() * 10 - 5;
    }
    return s;
}

std::vector<RoofHealth> codes(std::initializer_list<int> c) {
    std::vector<RoofHealth> out;
    for (int v : c) {
        out.push_back(roof_health_from_ordinal(v));
    }
    return out;
}

}  // namespace

TEST_CASE("raw Gini worked examples") {
    const std::vector<double> y{10, 0, 5};
    CHECK(raw_gini(y, std::vector<double>{3, 1, 2}) == doctest::Approx(2.0 / 9.0).epsilon(1e-14));
    CHECK(raw_gini(y, std::vector<double>{1, 3, 2}) == doctest::Approx(-2.0 / 9.0).epsilon(1e-14));
    CHECK(raw_gini(std::vector<double>{4}, std::vector<double>{1}) == doctest::Approx(0.0));
    CHECK(raw_gini(y, std::vector<double>{3, 2, 1}) == doctest::Approx(1.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("normalized Gini worked examples") {
    const std::vector<double> y{10, 0, 5};
    const auto perfect = normalized_gini(y, std::vector<double>{3, 1, 2});
    CHECK(perfect.normalized == doctest::Approx(1.0));
    CHECK(perfect.perfect_raw == doctest::Approx(2.0 / 9.0));
    CHECK(perfect.n == 3);
    CHECK(normalized_gini(y, std::vector<double>{3, 2, 1}).normalized == doctest::Approx(0.5));
    CHECK(normalized_gini(y, y).normalized == doctest::Approx(1.0));
}

TEST_CASE("undefined and malformed inputs") {
    const std::vector<double> zeros{0, 0, 0};
    const std::vector<double> constant{2, 2, 2};
    const std::vector<double> p{1, 2, 3};
    CHECK_THROWS_AS(raw_gini(zeros, p), UndefinedMetricError);
    CHECK_THROWS_AS(normalized_gini(zeros, p), UndefinedMetricError);
    CHECK_THROWS_AS(normalized_gini(constant, p), UndefinedMetricError);
    CHECK_THROWS_AS(raw_gini(p, std::vector<double>{1, 2}), UsageError);
    CHECK_THROWS_AS(raw_gini(std::vector<double>{}, std::vector<double>{}), UsageError);
    CHECK_THROWS_AS(pearson_correlation(constant, p), UndefinedMetricError);
    CHECK_THROWS_AS(ordinal_correlation(codes({0, 0, 0}), codes({0, 1, 2})), UndefinedMetricError);
    CHECK_THROWS_AS(ordinal_correlation(codes({0, 1}), codes({0, 1, 2})), UsageError);
    CHECK_THROWS_AS(tie_policy_from_string("median"), ConfigError);
}

TEST_CASE("raw Gini agrees with the quadratic reference, ties included") {
    Rng rng(1, "gini-ref");
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + rng.below(60);
        const auto y = random_losses(rng, n);
        const auto s = random_scores(rng, n, trial % 2 == 0 ? 4 : 0);
        REQUIRE(raw_gini(y, s) == doctest::Approx(reference_raw_gini(y, s)).epsilon(1e-12));
    }
}

TEST_CASE("average tie policy is the midpoint of the extreme orderings") {
    // y=[10,0,5], all predictions tied: best order [10,5,0] gives 2/9, worst
    // order [0,5,10] gives -2/9.
    const std::vector<double> y{10, 0, 5};
    const std::vector<double> tied{1, 1, 1};
    CHECK(raw_gini(y, tied, TiePolicy::average) == doctest::Approx(0.0).scale(1.0));
    CHECK(raw_gini(y, tied, TiePolicy::index) == doctest::Approx(reference_raw_gini(y, tied)));
    Rng rng(2, "gini-ties");
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.below(40);
        const auto y2 = random_losses(rng, n);
        const auto s = random_scores(rng, n, 0);
        REQUIRE(raw_gini(y2, s, TiePolicy::average) == doctest::Approx(raw_gini(y2, s, TiePolicy::index)));
    }
    CHECK(to_string(tie_policy_from_string("average")) == "average");
}

TEST_CASE("monotone invariance, bounds and reversal on random vectors") {
    Rng rng(3, "gini-props");
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + rng.below(200);
        auto y = random_losses(rng, n);
        y[1] = y[0] + 3.0;  // non-constant
        const auto s = random_scores(rng, n, trial % 3 == 0 ? 5 : 0);
        std::vector<double> f(n);
        std::vector<double> rev(n);
        for (std::size_t i = 0; i < n; ++i) {
            f[i] = std::exp(s[i] / 2.0) * 3.0 + 1.0;
            rev[i] = -y[i];
        }
        for (auto policy : {TiePolicy::index, TiePolicy::average}) {
            const auto g = normalized_gini(y, s, policy);
            REQUIRE(normalized_gini(y, f, policy).normalized == g.normalized);
            REQUIRE(g.normalized >= -1.0 - 1e-12);
            REQUIRE(g.normalized <= 1.0 + 1e-12);
        }
        // Ties in y make both tie policies matter for the reversal; use average.
        REQUIRE(normalized_gini(y, rev, TiePolicy::average).normalized == doctest::Approx(-1.0).epsilon(1e-9));
    }
}

TEST_CASE("reversal with distinct values is exactly minus one") {
    Rng rng(4, "gini-rev");
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.below(300);
        std::vector<double> y(n);
        std::vector<double> rev(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = 1.0 + rng.uniform() * 100.0;
            rev[i] = -y[i];
        }
        REQUIRE(normalized_gini(y, rev).normalized == doctest::Approx(-1.0).epsilon(1e-12));
    }
}

TEST_CASE("random permutations average to zero") {
    Rng rng(5, "gini-null");
    const std::size_t n = 1000;
    const auto y = random_losses(rng, n);
    std::vector<double> s(n);
    std::iota(s.begin(), s.end(), 0.0);
    double sum = 0.0;
    for (int k = 0; k < 1000; ++k) {
        for (std::size_t i = n - 1; i > 0; --i) {
            std::swap(s[i], s[rng.below(i + 1)]);
        }
        sum += normalized_gini(y, s).normalized;
    }
    CHECK(std::abs(sum / 1000.0) < 0.02);
}

TEST_CASE("ordinal correlation examples") {
    const auto a = codes({0, 0, 1, 2, 1, 0, 2});
    CHECK(ordinal_correlation(a, a) == doctest::Approx(1.0));
    // Good and Bad equally frequent, Fair unchanged by the swap.
    const auto bal = codes({0, 0, 1, 1, 1, 2, 2});
    const auto swapped = codes({2, 2, 1, 1, 1, 0, 0});
    CHECK(ordinal_correlation(bal, swapped) == doctest::Approx(-1.0));
    // Direct Pearson on [0,0,1,2] and [0,1,1,2] is 2/sqrt(5.5).
    const double r = ordinal_correlation(codes({0, 0, 1, 2}), codes({0, 1, 1, 2}));
    CHECK(r == doctest::Approx(2.0 / std::sqrt(5.5)).epsilon(1e-12));
    CHECK(r == doctest::Approx(0.852803).epsilon(1e-6));
    CHECK(ordinal_correlation(codes({0, 1, 1, 2}), codes({0, 0, 1, 2})) == doctest::Approx(r));
}

TEST_CASE("pearson and spearman against independent oracles") {
    Rng rng(6, "corr");
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 3 + rng.below(100);
        std::vector<double> a(n);
        std::vector<double> b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = static_cast<double>(rng.below(4));
            b[i] = a[i] + rng.uniform() * 3;
        }
        a[0] = 0;
        a[1] = 3;
        REQUIRE(pearson_correlation(a, b) == doctest::Approx(roofsim::testing::reference_pearson(a, b)));
        std::vector<double> ea(n);
        std::vector<double> eb(n);
        for (std::size_t i = 0; i < n; ++i) {
            ea[i] = std::exp(a[i]);
            eb[i] = b[i] * b[i] * b[i];
        }
        REQUIRE(spearman_correlation(ea, eb) == doctest::Approx(spearman_correlation(a, b)));
    }
    const std::vector<double> mono{1, 2, 3, 4, 5};
    const std::vector<double> cube{1, 8, 27, 64, 125};
    CHECK(spearman_correlation(mono, cube) == doctest::Approx(1.0));
    CHECK(pearson_correlation(mono, cube) < 1.0);
    // Average ranks [1.5,1.5,3,4] and [1,2.5,2.5,4] give 3.75 / 4.5.
    CHECK(ordinal_correlation(codes({0, 0, 1, 2}), codes({0, 1, 1, 2}), CorrelationKind::spearman) ==
          doctest::Approx(5.0 / 6.0).epsilon(1e-12));
}
