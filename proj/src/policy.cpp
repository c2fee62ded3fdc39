#include "roofsim/policy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "roofsim/csv.hpp"
#include "roofsim/error.hpp"
#include "roofsim/parallel.hpp"

namespace roofsim {

std::string_view to_string(RoofHealth rh) noexcept {
    switch (rh) {
        case RoofHealth::Good: return "Good";
        case RoofHealth::Fair: return "Fair";
        case RoofHealth::Bad: return "Bad";
    }
    return "?";
}

RoofHealth roof_health_from_string(std::string_view text) {
    for (auto rh : kAllRoofHealth) {
        if (to_string(rh) == text) {
            return rh;
        }
    }
    throw ValidationError("unknown RoofHealth '" + std::string(text) + "'");
}

RoofHealth roof_health_from_ordinal(int code) {
    if (code < 0 || code > 2) {
        throw ValidationError("RoofHealth ordinal out of range: " + std::to_string(code));
    }
    return static_cast<RoofHealth>(code);
}

std::string_view to_string(WallType wall) noexcept { return wall == WallType::Wood ? "Wood" : "Brick"; }

WallType wall_type_from_string(std::string_view text) {
    if (text == "Wood") {
        return WallType::Wood;
    }
    if (text == "Brick") {
        return WallType::Brick;
    }
    throw ValidationError("unknown WallType '" + std::string(text) + "'");
}

std::string format_policy_id(std::size_t index) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "POL-%06zu", index);
    return buffer;
}

void GenerationConfig::validate() const {
    if (n_policies < 1) {
        throw ParameterError("n_policies must be at least 1");
    }
    roofsim::validate(value_params);
    roofsim::validate(age_beta_params);
    roofsim::validate(wall_probs);
    roofsim::validate(risk_beta_params);
    roofsim::validate(fico_params);
    if (!(age_scale > 0.0)) {
        throw ParameterError("age_scale must be positive");
    }
    auto labels = wall_probs.labels;
    std::sort(labels.begin(), labels.end());
    if (labels != std::vector<std::string>{"Brick", "Wood"}) {
        throw ParameterError("wall_probs labels must be exactly {Wood, Brick}");
    }
    if (!(score_coeffs.credit_denominator > 0.0)) {
        throw ParameterError("credit_denominator must be positive");
    }
    if (!(score_coeffs.noise_sigma >= 0.0)) {
        throw ParameterError("noise_sigma must be nonnegative");
    }
    if (!(thresholds.fair_percentile > 0.0 && thresholds.fair_percentile < thresholds.bad_percentile &&
          thresholds.bad_percentile < 100.0)) {
        throw ParameterError("thresholds must satisfy 0 < fair_percentile < bad_percentile < 100");
    }
    if (!(frequency_coeffs.value_ref > 0.0)) {
        throw ParameterError("value_ref must be positive");
    }
    if (!(frequency_coeffs.nb_r > 0.0)) {
        throw ParameterError("nb_r must be positive");
    }
    if (!(severity_coeffs.gamma_k > 0.0)) {
        throw ParameterError("gamma_k must be positive");
    }
}

double latent_score(double house_age, double area_risk, int credit_score, double noise, const ScoreCoefficients& c) {
    return c.age_coeff * house_age + c.risk_coeff * area_risk +
           c.credit_coeff * (static_cast<double>(credit_score) / c.credit_denominator) + noise;
}

std::vector<PolicyRecord> generate_policies(const GenerationConfig& config, std::size_t threads) {
    config.validate();
    const std::size_t wood_index =
        static_cast<std::size_t>(std::find(config.wall_probs.labels.begin(), config.wall_probs.labels.end(), "Wood") -
                                 config.wall_probs.labels.begin());

    std::vector<PolicyRecord> records(config.n_policies);
    parallel_for(
        config.n_policies,
        [&](std::size_t i) {
            PolicyRecord& r = records[i];
            r.policy_id = format_policy_id(i + 1);
            Rng rng(config.master_seed, "policy:" + r.policy_id);
            // Draw order is part of the reproducibility contract.
            r.house_value = draw_lognormal(rng, config.value_params.mu_log, config.value_params.sigma_log);
            r.house_age = config.age_scale * draw_beta(rng, config.age_beta_params.a, config.age_beta_params.b);
            r.wall_type = draw_categorical(rng, config.wall_probs.probs) == wood_index ? WallType::Wood : WallType::Brick;
            r.area_risk = draw_beta(rng, config.risk_beta_params.a, config.risk_beta_params.b);
            r.credit_score = draw_fico(rng, config.fico_params);
            r.latent_noise = draw_normal(rng, 0.0, config.score_coeffs.noise_sigma);
            r.latent_score = latent_score(r.house_age, r.area_risk, r.credit_score, r.latent_noise, config.score_coeffs);
        },
        threads);
    return records;
}

double nearest_rank_percentile(std::span<const double> sorted_ascending, double percentile) {
    if (sorted_ascending.empty()) {
        throw UsageError("percentile of an empty batch");
    }
    const double n = static_cast<double>(sorted_ascending.size());
    // 1e-9 guard: 55% of 2000 is rank 1100, not 1101.
    auto rank = static_cast<long long>(std::ceil(percentile * n / 100.0 - 1e-9));
    rank = std::clamp<long long>(rank, 1, static_cast<long long>(sorted_ascending.size()));
    return sorted_ascending[static_cast<std::size_t>(rank - 1)];
}

RoofCutpoints assign_roof_health(std::span<PolicyRecord> records, const Thresholds& thresholds) {
    if (records.empty()) {
        throw UsageError("assign_roof_health needs at least one record");
    }
    std::vector<double> scores;
    scores.reserve(records.size());
    for (const auto& r : records) {
        scores.push_back(r.latent_score);
    }
    std::sort(scores.begin(), scores.end());
    const RoofCutpoints cuts{nearest_rank_percentile(scores, thresholds.fair_percentile),
                             nearest_rank_percentile(scores, thresholds.bad_percentile)};
    for (auto& r : records) {
        if (r.latent_score <= cuts.fair_cut) {
            r.roof_health = RoofHealth::Good;
        } else if (r.latent_score <= cuts.bad_cut) {
            r.roof_health = RoofHealth::Fair;
        } else {
            r.roof_health = RoofHealth::Bad;
        }
    }
    return cuts;
}

std::vector<std::string> policy_table_header(Visibility visibility) {
    std::vector<std::string> header{"PolicyID", "HouseValue", "HouseAge", "WallType", "AreaRisk", "CreditScore"};
    if (visibility == Visibility::full) {
        header.insert(header.end(), {"RoofHealth", "LatentScore"});
    }
    if (visibility != Visibility::released) {
        header.emplace_back("NextYearLoss");
    }
    return header;
}

std::string format_policy_table(std::span<const PolicyRecord> records, Visibility visibility) {
    std::string out = csv::join(policy_table_header(visibility));
    out += '\n';
    for (const auto& r : records) {
        std::vector<std::string> fields{
            r.policy_id,
            csv::format_fixed(r.house_value, 2),
            csv::format_fixed(r.house_age, 6),
            std::string(to_string(r.wall_type)),
            csv::format_fixed(r.area_risk, 6),
            std::to_string(r.credit_score),
        };
        if (visibility == Visibility::full) {
            fields.emplace_back(r.roof_health ? std::string(to_string(*r.roof_health)) : std::string());
            fields.push_back(csv::format_fixed(r.latent_score, 6));
        }
        if (visibility != Visibility::released) {
            if (visibility == Visibility::train && !r.next_year_loss) {
                throw UsageError("train export requires NextYearLoss for " + r.policy_id);
            }
            fields.push_back(r.next_year_loss ? csv::format_fixed(*r.next_year_loss, 2) : std::string());
        }
        out += csv::join(fields);
        out += '\n';
    }
    return out;
}

void export_policy_table(std::span<const PolicyRecord> records, const std::filesystem::path& destination,
                         Visibility visibility) {
    csv::write_file(destination, format_policy_table(records, visibility));
}

namespace {

std::vector<PolicyRecord> records_from_table(const csv::Table& table, std::string_view source) {
    const auto id_col = table.column("PolicyID");
    const auto value_col = table.column("HouseValue");
    const auto age_col = table.column("HouseAge");
    const auto wall_col = table.column("WallType");
    const auto risk_col = table.column("AreaRisk");
    const auto credit_col = table.column("CreditScore");
    const bool has_rh = table.has_column("RoofHealth");
    const bool has_score = table.has_column("LatentScore");
    const bool has_loss = table.has_column("NextYearLoss");

    std::vector<PolicyRecord> records;
    records.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        PolicyRecord r;
        const std::string context = std::string(source) + " row " + row[id_col];
        r.policy_id = row[id_col];
        r.house_value = csv::parse_double(row[value_col], context);
        r.house_age = csv::parse_double(row[age_col], context);
        r.wall_type = wall_type_from_string(row[wall_col]);
        r.area_risk = csv::parse_double(row[risk_col], context);
        r.credit_score = static_cast<int>(csv::parse_int(row[credit_col], context));
        if (has_rh && !row[table.column("RoofHealth")].empty()) {
            r.roof_health = roof_health_from_string(row[table.column("RoofHealth")]);
        }
        if (has_score) {
            r.latent_score = csv::parse_double(row[table.column("LatentScore")], context);
        }
        if (has_loss && !row[table.column("NextYearLoss")].empty()) {
            r.next_year_loss = csv::parse_double(row[table.column("NextYearLoss")], context);
        }
        records.push_back(std::move(r));
    }
    return records;
}

}  // namespace

std::vector<PolicyRecord> parse_policy_table(std::string_view text, std::string_view source) {
    std::istringstream in{std::string(text)};
    return records_from_table(csv::read_table(in, source), source);
}

std::vector<PolicyRecord> read_policy_table(const std::filesystem::path& source) {
    return records_from_table(csv::read_table_file(source), source.string());
}

std::vector<std::string> hidden_columns_in(const std::vector<std::string>& header, bool allow_target) {
    std::vector<std::string> found;
    for (const auto& column : header) {
        for (auto hidden : kHiddenColumns) {
            if (column == hidden && !(allow_target && hidden == "NextYearLoss")) {
                found.push_back(column);
            }
        }
    }
    return found;
}

}  // namespace roofsim
