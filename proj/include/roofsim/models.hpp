#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "roofsim/forest.hpp"
#include "roofsim/loss.hpp"
#include "roofsim/roof_channel.hpp"

namespace roofsim {

/// The six comparison tiers, in ladder order.
enum class TierName { tabular_only, cluster_labels, embedding_features, noisy_label, true_label, oracle };

inline constexpr std::array<TierName, 6> kAllTiers{TierName::tabular_only,       TierName::cluster_labels,
                                                   TierName::embedding_features, TierName::noisy_label,
                                                   TierName::true_label,         TierName::oracle};

std::string_view to_string(TierName name) noexcept;
TierName tier_name_from_string(std::string_view text);

/// Human-readable label of the tier as a table row.
std::string_view tier_display_name(TierName name) noexcept;

/// Tiers whose channel emulates an image pipeline rather than reproducing it.
bool is_substitute_channel(TierName name) noexcept;

enum class Encoding { one_hot, ordinal };
std::string_view to_string(Encoding encoding) noexcept;
Encoding encoding_from_string(std::string_view text);

/// Channel settings per tier. Only the fields relevant to `name` are used.
struct TierSpec {
    TierName name = TierName::tabular_only;
    Encoding encoding = Encoding::one_hot;
    EmbeddingParams embedding;
    std::size_t cluster_k = 3;
    double target_correlation = 0.8062;
    ConfusionMode confusion_mode = ConfusionMode::uniform;
    /// Fixed labeler accuracy; calibrated from target_correlation when empty.
    std::optional<double> accuracy;

    bool needs_channel() const noexcept {
        return name != TierName::tabular_only && name != TierName::oracle;
    }
};

/// Tabular columns: HouseValue, HouseAge, WallTypeIsWood (Wood = 1, Brick = 0),
/// AreaRisk, CreditScore. Channel columns follow: Cluster0..k-1 or ClusterId,
/// E0..E(dim-1), RoofGood/RoofFair/RoofBad or RoofHealthCode. NextYearLoss
/// fills `target` when every record has it.
FeatureMatrix assemble_features(std::span<const PolicyRecord> records, std::span<const ChannelOutput> channel,
                                const TierSpec& tier);

/// A generated dataset with a train/test split over `records`.
struct Dataset {
    std::vector<PolicyRecord> records;
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
    LossCoefficients coeffs;

    /// Throws IntegrityError on overlapping or out-of-range rows.
    void check_split() const;
};

struct TierMetadata {
    TierName name = TierName::tabular_only;
    std::optional<double> channel_correlation;
    std::optional<double> aligned_correlation;  // cluster tier diagnostics
    std::optional<double> labeler_accuracy;
    bool substitute = false;
    std::string channel_params_hash;
    std::size_t n_features = 0;
};

struct TierRun {
    std::vector<std::string> test_ids;
    std::vector<double> predictions;
    TierMetadata metadata;
};

/// Trains on the training rows and predicts the test rows. The oracle tier
/// returns oracle_predict and ignores `forest`. `channel` covers every record
/// of the dataset, in record order.
TierRun run_tier(const Dataset& dataset, const TierSpec& tier, std::span<const ChannelOutput> channel,
                 const ForestParams& forest, CorrelationKind correlation = CorrelationKind::pearson,
                 std::size_t threads = 0);

}  // namespace roofsim
