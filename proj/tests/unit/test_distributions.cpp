#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "roofsim/distributions.hpp"
#include "roofsim/error.hpp"
#include "test_support.hpp"

using namespace roofsim;
using roofsim::testing::moments;

namespace {

constexpr std::int64_t kDraws = 1'000'000;

SeedSpec seed(std::string label, std::uint64_t master = 20250101) { return {master, std::move(label)}; }

}  // namespace

TEST_CASE("rng streams are reproducible and label-sensitive") {
    Rng a(7, "policy:1");
    Rng b(7, "policy:1");
    Rng c(7, "policy:2");
    Rng d(8, "policy:1");
    bool differs_label = false;
    bool differs_master = false;
    for (int i = 0; i < 16; ++i) {
        const auto x = a();
        CHECK(x == b());
        differs_label |= x != c();
        differs_master |= x != d();
    }
    CHECK(differs_label);
    CHECK(differs_master);
    CHECK(derive_substream_seed(7, "policy:1") == derive_substream_seed(7, "policy:1"));
}

TEST_CASE("uniform helpers stay in range and below() is unbiased enough") {
    Rng rng(1, "u");
    std::array<int, 7> counts{};
    for (int i = 0; i < 70000; ++i) {
        const double u = rng.uniform();
        const double v = rng.uniform_open();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        REQUIRE(v > 0.0);
        REQUIRE(v < 1.0);
        ++counts[rng.below(7)];
    }
    for (int c : counts) {
        CHECK(std::abs(c - 10000) < 400);  // > 4 SE
    }
}

TEST_CASE("degenerate normal returns the mean") {
    const auto v = sample(Normal{0.0, 0.0}, seed("n0"), 3);
    CHECK(v == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("sample is deterministic for every family") {
    const std::vector<DistributionParams> families{
        LogNormal{12.9, 0.45},     Beta{4, 3}, Categorical{{"Wood", "Brick"}, {0.9, 0.1}}, NegBinomial{10, 2.0},
        GammaShapeScale{2, 548.3}, Normal{1, 2}, FicoBuckets::defaults()};
    for (const auto& p : families) {
        CAPTURE(describe(p));
        CHECK(sample(p, seed("det"), 1000) == sample(p, seed("det"), 1000));
        CHECK(sample(p, seed("det"), 1000) != sample(p, seed("det2"), 1000));
    }
}

TEST_CASE("log-normal median matches exp(mu_log)") {
    auto v = sample(LogNormal{12.9, 0.45}, seed("lognormal"), kDraws);
    std::nth_element(v.begin(), v.begin() + kDraws / 2, v.end());
    const double median = v[kDraws / 2];
    CHECK(std::abs(median / std::exp(12.9) - 1.0) < 0.01);
    CHECK(std::exp(12.9) == doctest::Approx(4.003e5).epsilon(1e-3));
}

TEST_CASE("log-normal mean and variance") {
    const auto v = sample(LogNormal{12.9, 0.45}, seed("lognormal-moments"), kDraws);
    const auto m = moments(v);
    const double s2 = 0.45 * 0.45;
    const double mean = std::exp(12.9 + s2 / 2.0);
    const double var = (std::exp(s2) - 1.0) * std::exp(2.0 * 12.9 + s2);
    CHECK(std::abs(m.mean - mean) < 3 * m.mean_se);
    CHECK(std::abs(m.variance - var) < 3 * m.variance_se);
}

TEST_CASE("negative binomial mean and variance identities") {
    for (double mean : {2.0, 5.0, 0.0498}) {
        CAPTURE(mean);
        const auto v = sample(NegBinomial{10.0, mean}, seed("nb" + std::to_string(mean)), kDraws);
        const auto m = moments(v);
        const double var = mean + mean * mean / 10.0;
        CHECK(std::abs(m.mean - mean) < 3 * m.mean_se);
        CHECK(std::abs(m.variance - var) < 3 * m.variance_se);
    }
}

TEST_CASE("negative binomial with a large mean uses the PTRS Poisson path") {
    const auto v = sample(NegBinomial{50.0, 40.0}, seed("nb-large"), 200000);
    const auto m = moments(v);
    CHECK(std::abs(m.mean - 40.0) < 3 * m.mean_se);
    CHECK(std::abs(m.variance - (40.0 + 1600.0 / 50.0)) < 3 * m.variance_se);
}

TEST_CASE("negbinomial_via_gamma_poisson") {
    SUBCASE("zero mean returns zero") { CHECK(negbinomial_via_gamma_poisson(10, 0.0, seed("z")) == 0); }
    SUBCASE("zero mass at exp(-3)") {
        const double m = std::exp(-3.0);
        const double p0 = std::pow(10.0 / (10.0 + m), 10.0);
        CHECK(p0 == doctest::Approx(0.9515).epsilon(1e-3));
        const int n = 1'000'000;
        int zeros = 0;
        for (int i = 0; i < n; ++i) {
            zeros += negbinomial_via_gamma_poisson(10, m, seed("zm:" + std::to_string(i))) == 0;
        }
        const double se = std::sqrt(p0 * (1 - p0) / n);
        CHECK(std::abs(zeros / double(n) - p0) < 3 * se);
    }
    SUBCASE("non-integer r is accepted") { CHECK_NOTHROW(negbinomial_via_gamma_poisson(2.5, 1.0, seed("r"))); }
    SUBCASE("nonpositive r is a parameter error") {
        CHECK_THROWS_AS(negbinomial_via_gamma_poisson(0.0, 1.0, seed("r")), ParameterError);
        CHECK_THROWS_AS(negbinomial_via_gamma_poisson(-1.0, 1.0, seed("r")), ParameterError);
    }
}

TEST_CASE("gamma mean and variance, including shape below one") {
    for (auto [k, theta] : std::vector<std::pair<double, double>>{{2.0, std::exp(7.0) / 2.0}, {0.4, 3.0}, {7.5, 0.2}}) {
        CAPTURE(k);
        const auto v = sample(GammaShapeScale{k, theta}, seed("gamma" + std::to_string(k)), kDraws);
        const auto m = moments(v);
        CHECK(std::abs(m.mean - k * theta) < 3 * m.mean_se);
        CHECK(std::abs(m.variance - k * theta * theta) < 3 * m.variance_se);
    }
}

TEST_CASE("beta means at the generator defaults") {
    for (auto [a, b] : std::vector<std::pair<double, double>>{{4.0, 3.0}, {2.0, 5.0}}) {
        CAPTURE(a);
        const auto v = sample(Beta{a, b}, seed("beta" + std::to_string(a)), kDraws);
        const auto m = moments(v);
        const double var = a * b / ((a + b) * (a + b) * (a + b + 1.0));
        CHECK(std::abs(m.mean - a / (a + b)) < 3 * m.mean_se);
        CHECK(std::abs(m.variance - var) < 3 * m.variance_se);
    }
}

TEST_CASE("normal moments") {
    const auto v = sample(Normal{0.0, 1.0}, seed("normal"), kDraws);
    const auto m = moments(v);
    CHECK(std::abs(m.mean) < 3 * m.mean_se);
    CHECK(std::abs(m.variance - 1.0) < 3 * m.variance_se);
}

TEST_CASE("categorical and fico frequencies") {
    const auto wall = sample(Categorical{{"Wood", "Brick"}, {0.9, 0.1}}, seed("wall"), kDraws);
    const double wood = static_cast<double>(std::count(wall.begin(), wall.end(), 0.0)) / kDraws;
    CHECK(std::abs(wood - 0.9) < 3 * std::sqrt(0.09 / kDraws));

    const auto fico = FicoBuckets::defaults();
    const auto scores = sample(fico, seed("fico"), kDraws);
    double expected_mean = 0.0;
    for (std::size_t b = 0; b < fico.bucket_bounds.size(); ++b) {
        expected_mean += fico.bucket_probs[b] * 0.5 * (fico.bucket_bounds[b].first + fico.bucket_bounds[b].second);
    }
    const auto m = moments(scores);
    CHECK(std::abs(m.mean - expected_mean) < 3 * m.mean_se);
    for (double s : scores) {
        REQUIRE(s == std::floor(s));
        REQUIRE(s >= 300);
        REQUIRE(s <= 850);
    }
}

TEST_CASE("support holds over random valid parameter sets") {
    Rng gen(99, "param-gen");
    for (int trial = 0; trial < 200; ++trial) {
        const double a = 0.05 + 10.0 * gen.uniform();
        const double b = 0.05 + 10.0 * gen.uniform();
        const SeedSpec s{static_cast<std::uint64_t>(trial), "support"};
        for (double v : sample(LogNormal{20.0 * gen.uniform() - 10.0, 0.01 + 2.0 * gen.uniform()}, s, 200)) {
            REQUIRE(v > 0.0);
        }
        for (double v : sample(Beta{a, b}, s, 200)) {
            REQUIRE(v >= 0.0);
            REQUIRE(v <= 1.0);
        }
        for (double v : sample(GammaShapeScale{a, b}, s, 200)) {
            REQUIRE(v > 0.0);
        }
        for (double v : sample(NegBinomial{a, 30.0 * gen.uniform() + 1e-3}, s, 200)) {
            REQUIRE(v >= 0.0);
            REQUIRE(v == std::floor(v));
        }
    }
}

TEST_CASE("labeled streams are uncorrelated") {
    const auto a = sample(Normal{0, 1}, seed("stream:a"), 100000);
    const auto b = sample(Normal{0, 1}, seed("stream:b"), 100000);
    for (std::size_t lag = 0; lag <= 5; ++lag) {
        std::vector<double> x(a.begin(), a.end() - static_cast<std::ptrdiff_t>(lag));
        std::vector<double> y(b.begin() + static_cast<std::ptrdiff_t>(lag), b.end());
        CAPTURE(lag);
        CHECK(std::abs(roofsim::testing::reference_pearson(x, y)) < 0.01);
    }
}

TEST_CASE("invalid parameters are rejected") {
    CHECK_THROWS_AS(validate(Beta{0.0, 1.0}), ParameterError);
    CHECK_THROWS_AS(validate(GammaShapeScale{-1.0, 1.0}), ParameterError);
    CHECK_THROWS_AS(validate(LogNormal{0.0, 0.0}), ParameterError);
    CHECK_THROWS_AS(validate(Normal{0.0, -1.0}), ParameterError);
    CHECK_THROWS_AS(validate(Categorical{{"a", "b"}, {0.5, 0.6}}), ParameterError);
    CHECK_THROWS_AS(validate(Categorical{{"a"}, {0.5, 0.5}}), ParameterError);
    CHECK_THROWS_AS(validate(FicoBuckets{{{300, 600}, {550, 850}}, {0.5, 0.5}}), ParameterError);
    CHECK_THROWS_AS(validate(FicoBuckets{{{200, 600}}, {1.0}}), ParameterError);
    CHECK_THROWS_AS(sample(Normal{0, 1}, seed("x"), -1), UsageError);
    CHECK(sample(Normal{0, 1}, seed("x"), 0).empty());
    CHECK_NOTHROW(validate(FicoBuckets::defaults()));
}
