#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "roofsim/error.hpp"
#include "roofsim/loss.hpp"
#include "test_support.hpp"

using namespace roofsim;

namespace {

PolicyRecord cell(double value, double age, double risk, WallType wall, RoofHealth rh, std::size_t index = 1) {
    PolicyRecord r;
    r.policy_id = format_policy_id(index);
    r.house_value = value;
    r.house_age = age;
    r.area_risk = risk;
    r.wall_type = wall;
    r.credit_score = 700;
    r.roof_health = rh;
    return r;
}

std::vector<PolicyRecord> frozen(const PolicyRecord& prototype, std::size_t n) {
    std::vector<PolicyRecord> out(n, prototype);
    for (std::size_t i = 0; i < n; ++i) {
        out[i].policy_id = format_policy_id(i + 1);
    }
    return out;
}

const LossCoefficients kDefaults{};

}  // namespace

TEST_CASE("frequency rate examples") {
    const FrequencyCoefficients f;
    CHECK(frequency_rate(cell(250000, 0, 0, WallType::Brick, RoofHealth::Good), f) ==
          doctest::Approx(0.049787).epsilon(1e-5));
    CHECK(frequency_rate(cell(250000, 0, 0, WallType::Brick, RoofHealth::Bad), f) ==
          doctest::Approx(0.548812).epsilon(1e-5));
    CHECK(frequency_rate(cell(250000 * std::exp(1.0), 100, 1, WallType::Wood, RoofHealth::Fair), f) ==
          doctest::Approx(std::exp(-0.72)).epsilon(1e-12));
    CHECK(std::exp(-0.72) == doctest::Approx(0.48675).epsilon(1e-5));
}

TEST_CASE("frequency rate errors") {
    const FrequencyCoefficients f;
    CHECK_THROWS_AS(frequency_rate(cell(0, 0, 0, WallType::Brick, RoofHealth::Good), f), DomainError);
    CHECK_THROWS_AS(frequency_rate(cell(-5, 0, 0, WallType::Brick, RoofHealth::Good), f), DomainError);
    auto r = cell(250000, 0, 0, WallType::Brick, RoofHealth::Good);
    r.roof_health.reset();
    CHECK_THROWS_AS(frequency_rate(r, f), UsageError);
    CHECK_THROWS_AS(severity_location(r, SeverityCoefficients{}), UsageError);
}

TEST_CASE("severity location examples") {
    const SeverityCoefficients s;
    CHECK(severity_location(cell(1, 0, 0, WallType::Brick, RoofHealth::Good), s) == doctest::Approx(7.0));
    CHECK(std::exp(7.0) == doctest::Approx(1096.63).epsilon(1e-5));
    CHECK(severity_location(cell(1, 0, 1, WallType::Wood, RoofHealth::Bad), s) == doctest::Approx(9.04));
    CHECK(std::exp(9.04) == doctest::Approx(8433.7).epsilon(1e-4));
    const double wood = severity_location(cell(1, 30, 0.4, WallType::Wood, RoofHealth::Fair), s);
    const double brick = severity_location(cell(1, 30, 0.4, WallType::Brick, RoofHealth::Fair), s);
    CHECK(wood - brick == doctest::Approx(0.02).epsilon(1e-12));
}

TEST_CASE("forced zero frequency yields zero losses") {
    LossCoefficients c;
    c.frequency.intercept = -50.0;
    const auto records = frozen(cell(500000, 100, 1, WallType::Wood, RoofHealth::Bad), 20000);
    for (const auto& o : simulate_losses(records, c, 1)) {
        REQUIRE(o.claim_count == 0);
        REQUIRE(o.total_loss == 0.0);
    }
}

TEST_CASE("compound-mean identity on a feature grid") {
    const std::size_t n = 100000;
    std::size_t index = 0;
    for (auto rh : kAllRoofHealth) {
        for (auto wall : {WallType::Brick, WallType::Wood}) {
            for (double risk : {0.0, 0.7}) {
                const auto proto = cell(250000, 20.0 * static_cast<double>(ordinal(rh)), risk, wall, rh);
                const double lambda = frequency_rate(proto, kDefaults.frequency);
                const double mu = severity_location(proto, kDefaults.severity);
                const auto outcomes = simulate_losses(frozen(proto, n), kDefaults, 1000 + index++);
                std::vector<double> y;
                y.reserve(n);
                for (const auto& o : outcomes) {
                    y.push_back(o.total_loss);
                }
                const auto m = roofsim::testing::moments(y);
                CAPTURE(to_string(rh));
                CAPTURE(risk);
                CHECK(std::abs(m.mean - lambda * std::exp(mu)) < 3 * m.mean_se);
            }
        }
    }
}

TEST_CASE("baseline cell mean is 54.60") {
    const auto proto = cell(250000, 0, 0, WallType::Brick, RoofHealth::Good);
    const auto outcomes = simulate_losses(frozen(proto, 100000), kDefaults, 42);
    std::vector<double> y;
    for (const auto& o : outcomes) {
        y.push_back(o.total_loss);
    }
    const auto m = roofsim::testing::moments(y);
    CHECK(std::exp(-3.0) * std::exp(7.0) == doctest::Approx(54.60).epsilon(1e-3));
    CHECK(std::abs(m.mean - 54.598) < 3 * m.mean_se);
}

TEST_CASE("zero mass matches the negative binomial") {
    const auto proto = cell(250000, 40, 0.3, WallType::Wood, RoofHealth::Fair);
    const double lambda = frequency_rate(proto, kDefaults.frequency);
    const double p0 = std::pow(10.0 / (10.0 + lambda), 10.0);
    const std::size_t n = 100000;
    const auto outcomes = simulate_losses(frozen(proto, n), kDefaults, 7);
    std::size_t zeros = 0;
    for (const auto& o : outcomes) {
        zeros += o.total_loss == 0.0;
    }
    CHECK(std::abs(static_cast<double>(zeros) / n - p0) < 3 * std::sqrt(p0 * (1 - p0) / n));
}

TEST_CASE("claim support and exact sums") {
    GenerationConfig cfg;
    auto records = generate_policies(cfg);
    assign_roof_health(records, cfg.thresholds);
    const auto outcomes = simulate_losses(records, loss_coefficients(cfg), 0);
    REQUIRE(outcomes.size() == records.size());
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const auto& o = outcomes[i];
        CHECK(o.policy_id == records[i].policy_id);
        CHECK(o.claim_losses.size() == o.claim_count);
        double sum = 0.0;
        for (double z : o.claim_losses) {
            CHECK(z > 0.0);
            sum += z;
        }
        CHECK(o.total_loss == sum);
        CHECK((o.claim_count == 0) == (o.total_loss == 0.0));
    }
}

TEST_CASE("monotonicity in area risk and roof health") {
    for (double risk = 0.0; risk < 1.0; risk += 0.05) {
        const auto lo = cell(300000, 10, risk, WallType::Wood, RoofHealth::Good);
        const auto hi = cell(300000, 10, risk + 0.05, WallType::Wood, RoofHealth::Good);
        CHECK(frequency_rate(hi, kDefaults.frequency) >= frequency_rate(lo, kDefaults.frequency));
        CHECK(severity_location(hi, kDefaults.severity) >= severity_location(lo, kDefaults.severity));
    }
    double last_lambda = 0.0;
    double last_mu = -std::numeric_limits<double>::infinity();
    for (auto rh : kAllRoofHealth) {
        const auto r = cell(300000, 10, 0.2, WallType::Brick, rh);
        CHECK(frequency_rate(r, kDefaults.frequency) > last_lambda);
        CHECK(severity_location(r, kDefaults.severity) > last_mu);
        last_lambda = frequency_rate(r, kDefaults.frequency);
        last_mu = severity_location(r, kDefaults.severity);
    }
}

TEST_CASE("oracle predictions") {
    const std::vector<PolicyRecord> pair{cell(250000, 0, 0, WallType::Brick, RoofHealth::Good, 1),
                                         cell(250000, 0, 0, WallType::Brick, RoofHealth::Bad, 2)};
    const auto p = oracle_predict(pair, kDefaults);
    CHECK(p[0].expected_loss == doctest::Approx(54.598).epsilon(1e-4));
    CHECK(p[1].expected_loss / p[0].expected_loss == doctest::Approx(std::exp(4.4)).epsilon(1e-12));
    CHECK(p[0].policy_id == "POL-000001");
}

TEST_CASE("oracle and simulation are deterministic") {
    GenerationConfig cfg;
    cfg.n_policies = 500;
    auto records = generate_policies(cfg);
    assign_roof_health(records, cfg.thresholds);
    const auto c = loss_coefficients(cfg);
    const auto a = oracle_predict(records, c);
    cfg.master_seed = 9;
    const auto b = oracle_predict(records, c);
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].expected_loss == b[i].expected_loss);
    }
    const auto s1 = format_claims_jsonl(simulate_losses(records, c, 5, 1));
    const auto s2 = format_claims_jsonl(simulate_losses(records, c, 5, 3));
    CHECK(s1 == s2);
    CHECK(s1 != format_claims_jsonl(simulate_losses(records, c, 6, 1)));
}

TEST_CASE("changing gamma_k leaves claim counts unchanged") {
    GenerationConfig cfg;
    cfg.n_policies = 1000;
    auto records = generate_policies(cfg);
    assign_roof_health(records, cfg.thresholds);
    auto c = loss_coefficients(cfg);
    const auto a = simulate_losses(records, c, 11);
    c.severity.gamma_k = 5.0;
    const auto b = simulate_losses(records, c, 11);
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].claim_count == b[i].claim_count);
    }
}

TEST_CASE("apply_losses and claims jsonl") {
    std::vector<PolicyRecord> records = frozen(cell(250000, 50, 0.9, WallType::Wood, RoofHealth::Bad), 200);
    const auto outcomes = simulate_losses(records, kDefaults, 3);
    apply_losses(records, outcomes);
    std::size_t claims = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(records[i].next_year_loss == outcomes[i].total_loss);
        claims += outcomes[i].claim_count;
    }
    const auto jsonl = format_claims_jsonl(outcomes);
    CHECK(static_cast<std::size_t>(std::count(jsonl.begin(), jsonl.end(), '\n')) == claims);
    if (claims > 0) {
        CHECK(jsonl.rfind("{\"policy_id\":\"POL-", 0) == 0);
    }
    auto shuffled = records;
    std::swap(shuffled[0], shuffled[1]);
    CHECK_THROWS(apply_losses(shuffled, outcomes));
}
