#include "roofsim/loss.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "roofsim/csv.hpp"
#include "roofsim/error.hpp"
#include "roofsim/parallel.hpp"

namespace roofsim {

namespace {

RoofHealth require_roof(const PolicyRecord& record) {
    if (!record.roof_health) {
        throw UsageError("roof health not assigned for " + record.policy_id);
    }
    return *record.roof_health;
}

}  // namespace

double frequency_rate(const PolicyRecord& record, const FrequencyCoefficients& coeffs) {
    if (!(record.house_value > 0.0)) {
        throw DomainError("house_value must be positive for " + record.policy_id);
    }
    const auto rh = require_roof(record);
    const double eta = coeffs.intercept + coeffs.log_value_coeff * std::log(record.house_value / coeffs.value_ref) +
                       coeffs.age_coeff * record.house_age + coeffs.risk_coeff * record.area_risk +
                       coeffs.alpha_rh[static_cast<std::size_t>(ordinal(rh))];
    return std::exp(eta);
}

double severity_location(const PolicyRecord& record, const SeverityCoefficients& coeffs) {
    const auto rh = require_roof(record);
    return coeffs.intercept + (record.wall_type == WallType::Wood ? coeffs.wood_coeff : 0.0) +
           coeffs.risk_coeff * record.area_risk + coeffs.beta_rh[static_cast<std::size_t>(ordinal(rh))];
}

std::vector<ClaimOutcome> simulate_losses(std::span<const PolicyRecord> records, const LossCoefficients& coeffs,
                                          std::uint64_t seed, std::size_t threads) {
    if (!(coeffs.frequency.nb_r > 0.0)) {
        throw ParameterError("nb_r must be positive");
    }
    if (!(coeffs.severity.gamma_k > 0.0)) {
        throw ParameterError("gamma_k must be positive");
    }
    std::vector<ClaimOutcome> outcomes(records.size());
    parallel_for(
        records.size(),
        [&](std::size_t i) {
            const auto& r = records[i];
            ClaimOutcome& out = outcomes[i];
            out.policy_id = r.policy_id;
            out.lambda = frequency_rate(r, coeffs.frequency);
            out.mu = severity_location(r, coeffs.severity);

            Rng frequency_rng(seed, "frequency:" + r.policy_id);
            out.claim_count = draw_negbinomial(frequency_rng, coeffs.frequency.nb_r, out.lambda);

            Rng severity_rng(seed, "severity:" + r.policy_id);
            const double theta = std::exp(out.mu) / coeffs.severity.gamma_k;
            out.claim_losses.reserve(out.claim_count);
            for (std::uint64_t j = 0; j < out.claim_count; ++j) {
                const double z = draw_gamma(severity_rng, coeffs.severity.gamma_k, theta);
                out.claim_losses.push_back(z);
                out.total_loss += z;
            }
        },
        threads);
    return outcomes;
}

void apply_losses(std::span<PolicyRecord> records, std::span<const ClaimOutcome> outcomes) {
    if (records.size() != outcomes.size()) {
        throw UsageError("apply_losses: record and outcome counts differ");
    }
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].policy_id != outcomes[i].policy_id) {
            throw IntegrityError("apply_losses: id mismatch at position " + std::to_string(i));
        }
        records[i].next_year_loss = outcomes[i].total_loss;
    }
}

std::vector<OraclePrediction> oracle_predict(std::span<const PolicyRecord> records, const LossCoefficients& coeffs) {
    std::vector<OraclePrediction> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        out.push_back({r.policy_id, frequency_rate(r, coeffs.frequency) * std::exp(severity_location(r, coeffs.severity))});
    }
    return out;
}

std::string format_claims_jsonl(std::span<const ClaimOutcome> outcomes) {
    std::string out;
    for (const auto& o : outcomes) {
        for (std::size_t j = 0; j < o.claim_losses.size(); ++j) {
            nlohmann::ordered_json line;
            line["policy_id"] = o.policy_id;
            line["claim_index"] = j;
            line["loss"] = o.claim_losses[j];
            out += line.dump();
            out += '\n';
        }
    }
    return out;
}

void write_claims_jsonl(std::span<const ClaimOutcome> outcomes, const std::filesystem::path& destination) {
    csv::write_file(destination, format_claims_jsonl(outcomes));
}

}  // namespace roofsim
