#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "roofsim/config.hpp"
#include "roofsim/models.hpp"

namespace roofsim {

/// Sub-seed for a named component of one experiment seed.
std::uint64_t component_seed(std::uint64_t seed, std::string_view component);

/// Policies, roof health, losses and the train/test split for one seed.
Dataset generate_dataset(const ExperimentConfig& config, std::uint64_t seed);

/// Rows for the train and test sides: seeded shuffle (stream "split") or the
/// first n_train records. Both sides come back in record order.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_rows(std::size_t n_records,
                                                                         const SplitConfig& split,
                                                                         std::uint64_t seed);

/// Writes train.csv, test.csv, answers.csv, policies_full.csv and
/// dataset_manifest.json into `dir`, then re-reads the public files to check
/// that no hidden column leaked. Throws ValidationError on a leak.
void write_dataset_files(const Dataset& dataset, const std::filesystem::path& dir, const std::string& fingerprint,
                         std::uint64_t seed);

/// Channel outputs keyed by tier, for every tier in the config that needs one.
struct ChannelSet {
    std::map<TierName, std::vector<ChannelOutput>> by_tier;
    std::map<TierName, double> labeler_accuracy;
    std::vector<PromptSpec> prompts;
};

ChannelSet compute_channels(const Dataset& dataset, const ExperimentConfig& config, std::uint64_t seed);

struct TierResult {
    TierName name = TierName::tabular_only;
    GiniResult gini;
    double gini_average_ties = 0.0;  // normalized Gini under the average tie policy
    TierMetadata metadata;
    double runtime_seconds = 0.0;
};

struct SeedReport {
    std::uint64_t seed = 0;
    std::string fingerprint;
    std::vector<TierResult> tiers;
    std::array<std::size_t, 3> class_counts{0, 0, 0};
    RoofCutpoints cutpoints;
    std::optional<std::string> error;  // set when the seed aborted
    std::string failed_stage;

    const TierResult* find(TierName name) const;
};

/// Deterministic JSON (no runtimes).
nlohmann::ordered_json to_json(const SeedReport& report);
SeedReport seed_report_from_json(const nlohmann::json& j);

/// Plain-text table grouped by tier family.
std::string format_report_table(const SeedReport& report);

struct TierSummary {
    TierName name = TierName::tabular_only;
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation; 0 for a single seed
    std::optional<double> mean_correlation;
    std::size_t n_seeds = 0;
};

struct SeedSummary {
    std::vector<TierSummary> tiers;
    std::vector<std::uint64_t> seeds;
    /// Seeds whose ordering breaks the expected ladder, with the broken comparisons.
    std::map<std::uint64_t, std::vector<std::string>> ladder_deviations;

    const TierSummary* find(TierName name) const;
};

/// Checks tabular < cluster < {noisy, embedding} < true <= oracle + 0.01 on
/// whichever of those tiers are present; returns the violated comparisons.
std::vector<std::string> ladder_violations(const std::map<TierName, double>& gini);

/// Aggregates successful seed reports. Throws UsageError if the tier sets differ.
SeedSummary summarize_seeds(const std::vector<SeedReport>& reports);

nlohmann::ordered_json to_json(const SeedSummary& summary);
std::string format_summary_table(const SeedSummary& summary);

struct EvaluationReport {
    std::string fingerprint;
    std::vector<SeedReport> seeds;
    SeedSummary summary;
    std::filesystem::path directory;
};

/// Runs one seed end to end in memory. When `dir` is set, writes datasets,
/// manifests, channel and prediction files and the per-seed report there.
SeedReport run_seed(const ExperimentConfig& config, std::uint64_t seed,
                    const std::optional<std::filesystem::path>& dir = std::nullopt);

/// Every configured seed in parallel, then the aggregate. Output goes to
/// <output_dir>/<fingerprint>/seed-<seed>/ plus aggregate.json and aggregate.txt.
EvaluationReport run_experiment(const ExperimentConfig& config, bool write_files = true);

struct ScoreResult {
    GiniResult gini;
    std::vector<std::string> warnings;
};

/// Joins predictions (PolicyID,Prediction) to answers (PolicyID,NextYearLoss)
/// on PolicyID and scores them.
ScoreResult score_submission(const std::filesystem::path& predictions_file, const std::filesystem::path& answers_file,
                             const MetricOptions& options = {});

nlohmann::ordered_json to_json(const ScoreResult& result);

}  // namespace roofsim
