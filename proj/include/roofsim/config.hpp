#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "roofsim/forest.hpp"
#include "roofsim/metrics.hpp"
#include "roofsim/models.hpp"
#include "roofsim/policy.hpp"
#include "roofsim/roof_channel.hpp"

namespace roofsim {

enum class SplitRule { first_n, seeded_shuffle };
std::string_view to_string(SplitRule rule) noexcept;
SplitRule split_rule_from_string(std::string_view text);

struct SplitConfig {
    std::size_t n_train = 1000;
    std::size_t n_test = 1000;
    SplitRule rule = SplitRule::seeded_shuffle;
};

struct MetricOptions {
    TiePolicy tie_policy = TiePolicy::index;
    CorrelationKind correlation = CorrelationKind::pearson;
};

/// Everything a run needs. `generation.master_seed` is overwritten per entry
/// of `seeds`, and `forest.seed` is derived per (seed, tier).
struct ExperimentConfig {
    GenerationConfig generation;
    SplitConfig split;
    std::vector<TierSpec> tiers;
    ForestParams forest;
    MetricOptions metrics;
    DescriptorTable descriptors = DescriptorTable::defaults();
    std::size_t calibration_batch = 100000;
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
    std::filesystem::path output_dir = "out";
    /// Worker threads; 0 uses the hardware concurrency. Never affects results.
    std::size_t threads = 0;

    /// The default six-tier ladder.
    static std::vector<TierSpec> default_tiers();
    static ExperimentConfig defaults();

    /// Throws ConfigError on any inconsistency.
    void validate() const;
};

nlohmann::ordered_json to_json(const ExperimentConfig& config);

/// Strict parse: unknown keys are rejected, missing keys keep their defaults.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// 16 hex digits of FNV-1a over the canonical JSON form. Covers every field
/// except output_dir and threads, which cannot change results.
std::string config_fingerprint(const ExperimentConfig& config);

}  // namespace roofsim
