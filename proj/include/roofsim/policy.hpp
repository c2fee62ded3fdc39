#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "roofsim/distributions.hpp"

namespace roofsim {

/// Latent roof condition. The ordinal codes 0/1/2 index the frequency and
/// severity offsets and are the values correlated by the metrics module.
enum class RoofHealth : int { Good = 0, Fair = 1, Bad = 2 };

inline constexpr std::array<RoofHealth, 3> kAllRoofHealth{RoofHealth::Good, RoofHealth::Fair, RoofHealth::Bad};

constexpr int ordinal(RoofHealth rh) noexcept { return static_cast<int>(rh); }
std::string_view to_string(RoofHealth rh) noexcept;
RoofHealth roof_health_from_string(std::string_view text);
RoofHealth roof_health_from_ordinal(int code);

enum class WallType { Wood, Brick };
std::string_view to_string(WallType wall) noexcept;
WallType wall_type_from_string(std::string_view text);

/// One insured property. The first six fields are the released features;
/// the rest are hidden or outcome fields.
struct PolicyRecord {
    std::string policy_id;
    double house_value = 0.0;
    double house_age = 0.0;
    WallType wall_type = WallType::Wood;
    double area_risk = 0.0;
    int credit_score = 0;

    double latent_score = 0.0;
    double latent_noise = 0.0;
    std::optional<RoofHealth> roof_health;
    std::optional<double> next_year_loss;
};

std::string format_policy_id(std::size_t index);

struct ScoreCoefficients {
    double age_coeff = 0.02;
    double risk_coeff = 3.0;
    double credit_coeff = -2.0;
    double credit_denominator = 850.0;
    double noise_sigma = 1.0;
};

struct Thresholds {
    double fair_percentile = 55.0;
    double bad_percentile = 80.0;
};

struct FrequencyCoefficients {
    double intercept = -3.0;
    double log_value_coeff = 0.03;
    double value_ref = 250000.0;
    double age_coeff = 0.01;
    double risk_coeff = 0.05;
    std::array<double, 3> alpha_rh{0.0, 1.2, 2.4};
    double nb_r = 10.0;
};

struct SeverityCoefficients {
    double intercept = 7.0;
    double wood_coeff = 0.02;
    double risk_coeff = 0.02;
    std::array<double, 3> beta_rh{0.0, 1.0, 2.0};
    double gamma_k = 2.0;
};

/// Every distribution parameter and coefficient of the generative process.
/// Defaults are the reference values of the generative process.
struct GenerationConfig {
    std::size_t n_policies = 2000;
    LogNormal value_params{12.9, 0.45};
    double age_scale = 120.0;
    Beta age_beta_params{4.0, 3.0};
    Categorical wall_probs{{"Wood", "Brick"}, {0.9, 0.1}};
    Beta risk_beta_params{2.0, 5.0};
    FicoBuckets fico_params = FicoBuckets::defaults();
    ScoreCoefficients score_coeffs;
    Thresholds thresholds;
    FrequencyCoefficients frequency_coeffs;
    SeverityCoefficients severity_coeffs;
    std::uint64_t master_seed = 0;

    /// Throws ParameterError on any invalid field.
    void validate() const;
};

/// S = age_coeff*age + risk_coeff*risk + credit_coeff*(credit/credit_denominator) + noise.
double latent_score(double house_age, double area_risk, int credit_score, double noise, const ScoreCoefficients& c);

/// Draws the feature table and latent scores. Policy i uses the stream
/// "policy:POL-00000i" of the master seed, so the output does not depend on
/// `threads`. roof_health is left unset.
std::vector<PolicyRecord> generate_policies(const GenerationConfig& config, std::size_t threads = 0);

/// The nearest-rank cut points used by assign_roof_health.
struct RoofCutpoints {
    double fair_cut = 0.0;  // scores <= fair_cut are Good
    double bad_cut = 0.0;   // scores in (fair_cut, bad_cut] are Fair, above are Bad
};

/// Value at rank ceil(q * n / 100) of the ascending sample, rank clamped to [1, n].
double nearest_rank_percentile(std::span<const double> sorted_ascending, double percentile);

/// Partitions the batch by nearest-rank percentiles of latent_score.
RoofCutpoints assign_roof_health(std::span<PolicyRecord> records, const Thresholds& thresholds);

enum class Visibility {
    released,  // PolicyID and the six features
    train,     // released + NextYearLoss
    full,      // released + RoofHealth, LatentScore, NextYearLoss
};

/// Column names that must never appear in a released table.
inline constexpr std::array<std::string_view, 4> kHiddenColumns{"RoofHealth", "LatentScore", "LatentNoise",
                                                               "NextYearLoss"};

std::vector<std::string> policy_table_header(Visibility visibility);

/// CSV text. HouseValue and NextYearLoss use 2 decimals; HouseAge, AreaRisk
/// and LatentScore use 6; CreditScore is an integer. A missing NextYearLoss
/// or RoofHealth in a full export is written as an empty field.
std::string format_policy_table(std::span<const PolicyRecord> records, Visibility visibility);
void export_policy_table(std::span<const PolicyRecord> records, const std::filesystem::path& destination,
                         Visibility visibility);

/// Reads any table written by export_policy_table; optional columns are
/// picked up when present.
std::vector<PolicyRecord> read_policy_table(const std::filesystem::path& source);
std::vector<PolicyRecord> parse_policy_table(std::string_view text, std::string_view source = "<memory>");

/// Hidden columns present in `header`; NextYearLoss is tolerated when `allow_target`.
std::vector<std::string> hidden_columns_in(const std::vector<std::string>& header, bool allow_target);

}  // namespace roofsim
