#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "roofsim/policy.hpp"

namespace roofsim {

/// Compound frequency-severity draw for one policy.
struct ClaimOutcome {
    std::string policy_id;
    double lambda = 0.0;
    std::uint64_t claim_count = 0;
    double mu = 0.0;
    std::vector<double> claim_losses;
    double total_loss = 0.0;
};

struct LossCoefficients {
    FrequencyCoefficients frequency;
    SeverityCoefficients severity;
};

inline LossCoefficients loss_coefficients(const GenerationConfig& config) {
    return {config.frequency_coeffs, config.severity_coeffs};
}

/// Expected claim count: exp(intercept + log_value_coeff*ln(value/value_ref)
/// + age_coeff*age + risk_coeff*risk + alpha_rh[roof]).
double frequency_rate(const PolicyRecord& record, const FrequencyCoefficients& coeffs);

/// Log-scale severity location: intercept + wood_coeff*[Wood] + risk_coeff*risk
/// + beta_rh[roof]. The mean claim size is exp(mu).
double severity_location(const PolicyRecord& record, const SeverityCoefficients& coeffs);

/// For each policy: N ~ NB(nb_r, lambda) from stream "frequency:<id>", then
/// N claims Z ~ Gamma(gamma_k, exp(mu)/gamma_k) from stream "severity:<id>".
std::vector<ClaimOutcome> simulate_losses(std::span<const PolicyRecord> records, const LossCoefficients& coeffs,
                                          std::uint64_t seed, std::size_t threads = 0);

/// Copies total_loss into next_year_loss, matched by position and checked by id.
void apply_losses(std::span<PolicyRecord> records, std::span<const ClaimOutcome> outcomes);

struct OraclePrediction {
    std::string policy_id;
    double expected_loss = 0.0;
};

/// lambda * exp(mu) per policy, using the true roof health.
std::vector<OraclePrediction> oracle_predict(std::span<const PolicyRecord> records, const LossCoefficients& coeffs);

/// One JSON object per claim: {"policy_id", "claim_index", "loss"}.
std::string format_claims_jsonl(std::span<const ClaimOutcome> outcomes);
void write_claims_jsonl(std::span<const ClaimOutcome> outcomes, const std::filesystem::path& destination);

}  // namespace roofsim
