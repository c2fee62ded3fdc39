#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "roofsim/metrics.hpp"
#include "roofsim/policy.hpp"

namespace roofsim {

// ---------------------------------------------------------------------------
// Prompt manifest

inline constexpr std::array<std::string_view, 5> kRoofStyles{"gable", "hip", "flat", "mansard", "shed"};
inline constexpr std::array<std::string_view, 5> kShingleColors{"dark-gray", "light-gray", "brown", "black", "red-tile"};

/// Surface, edge and extra descriptor phrases per roof-health category.
struct DescriptorTable {
    struct Slots {
        std::vector<std::string> surface;
        std::vector<std::string> edge;
        std::vector<std::string> extra;
    };
    std::array<Slots, 3> by_health;  // indexed by ordinal code

    const Slots& slots(RoofHealth rh) const { return by_health[static_cast<std::size_t>(ordinal(rh))]; }

    static DescriptorTable defaults();

    /// Every slot nonempty and no phrase shared between categories; throws ConfigError.
    void validate() const;
};

struct PromptSpec {
    std::string policy_id;
    std::string roof_style;
    std::string shingle_color;
    std::string surface_descriptor;
    std::string edge_descriptor;
    std::string extra_descriptor;
    std::string prompt_text;
};

std::string expand_prompt(std::string_view roof_style, std::string_view shingle_color, std::string_view surface,
                          std::string_view edge, std::string_view extra);

/// One prompt per policy from stream "prompt:<id>". No image service is called.
std::vector<PromptSpec> generate_prompts(std::span<const PolicyRecord> records, const DescriptorTable& table,
                                         std::uint64_t seed);

/// JSONL with fields policy_id, roof_style, shingle_color, surface, edge, extra, prompt.
std::string format_prompt_manifest(std::span<const PromptSpec> prompts);
void write_prompt_manifest(std::span<const PromptSpec> prompts, const std::filesystem::path& destination);

/// Category whose descriptors all occur in the prompt, if exactly one does.
std::optional<RoofHealth> roof_health_from_prompt(std::string_view prompt_text, const DescriptorTable& table);

/// Hook for a real text-to-image backend. `submit` returns the path of the
/// produced image, or nothing when no image was produced.
class ImageClient {
public:
    virtual ~ImageClient() = default;
    virtual std::optional<std::filesystem::path> submit(const PromptSpec& prompt) = 0;
};

class NullImageClient final : public ImageClient {
public:
    std::optional<std::filesystem::path> submit(const PromptSpec&) override { return std::nullopt; }
};

// ---------------------------------------------------------------------------
// Information channels standing in for image-derived features

enum class ChannelName { true_label, noisy_label, embedding, cluster };

std::string_view to_string(ChannelName name) noexcept;

struct ChannelOutput {
    std::string policy_id;
    std::optional<RoofHealth> predicted_label;
    std::optional<std::vector<double>> embedding;
    std::optional<int> cluster_id;
    ChannelName channel_name = ChannelName::true_label;
    std::string channel_params_hash;
};

std::vector<ChannelOutput> true_label_channel(std::span<const PolicyRecord> records);

enum class ConfusionMode {
    uniform,   // wrong label uniform over the two other classes
    adjacent,  // Good<->Bad confusions get half weight, then renormalized
};

std::string_view to_string(ConfusionMode mode) noexcept;
ConfusionMode confusion_mode_from_string(std::string_view text);

/// Probability of reporting `reported` when the truth is `truth` and a wrong
/// label is to be drawn.
double wrong_label_probability(RoofHealth truth, RoofHealth reported, ConfusionMode mode);

/// Maps the two uniforms of one labeling decision to a reported label.
RoofHealth noisy_label(RoofHealth truth, double accuracy, ConfusionMode mode, double u_keep, double u_wrong);

/// Keeps the truth with probability `accuracy` (stream "noisy:<id>"); accuracy in [1/3, 1].
std::vector<ChannelOutput> noisy_label_channel(std::span<const PolicyRecord> records, double accuracy,
                                               ConfusionMode mode, std::uint64_t seed);

struct CalibrationResult {
    double accuracy = 1.0;
    double achieved_correlation = 1.0;
    int iterations = 0;
};

/// Bisection on accuracy in [1/3, 1] until the correlation measured on a
/// simulated batch is within 0.005 of `target_correlation` (at most 40 steps).
/// Truth labels are drawn from `class_proportions`; the same batch of
/// uniforms is reused at every step.
CalibrationResult calibrate_labeler(double target_correlation, ConfusionMode mode,
                                    const std::array<double, 3>& class_proportions, std::uint64_t seed,
                                    std::size_t batch_size = 100000);

struct EmbeddingParams {
    std::size_t dim = 32;
    double class_separation = 4.0;
    double noise_sigma = 1.0;
};

/// Class means are class_separation times three orthonormal directions drawn
/// from stream "embedding-basis"; each policy adds N(0, noise_sigma^2 I)
/// noise from stream "embedding:<id>".
std::vector<ChannelOutput> embedding_channel(std::span<const PolicyRecord> records, const EmbeddingParams& params,
                                             std::uint64_t seed);

/// Orthonormal class directions used by embedding_channel for `seed`.
std::array<std::vector<double>, 3> embedding_directions(std::size_t dim, std::uint64_t seed);

struct KMeansResult {
    std::vector<int> assignments;
    std::vector<double> centers;  // k x dim, row-major
    int iterations = 0;
    bool converged = false;
};

/// Lloyd's algorithm with k-means++ seeding. Stops after `max_iterations` or
/// when the summed center movement drops below `tolerance`.
KMeansResult kmeans(std::span<const double> points, std::size_t dim, std::size_t k, std::uint64_t seed,
                    int max_iterations = 100, double tolerance = 1e-8);

/// Runs kmeans over the embeddings and attaches cluster ids.
std::vector<ChannelOutput> cluster_channel(std::span<const ChannelOutput> embeddings, std::size_t k,
                                           std::uint64_t seed);

/// Pearson correlation between raw cluster indices and ordinal truth codes.
double raw_cluster_correlation(std::span<const int> cluster_ids, std::span<const RoofHealth> truth);

/// Best correlation over relabelings of the clusters: all permutations when
/// k == 3, majority-class mapping otherwise.
double aligned_cluster_correlation(std::span<const int> cluster_ids, std::span<const RoofHealth> truth, std::size_t k);

/// Correlation of a channel's predicted labels with the truth.
double label_channel_correlation(std::span<const ChannelOutput> outputs, std::span<const PolicyRecord> records,
                                 CorrelationKind kind = CorrelationKind::pearson);

/// CSV keyed by PolicyID with the fields present in the first output.
std::string format_channel_csv(std::span<const ChannelOutput> outputs);
void write_channel_csv(std::span<const ChannelOutput> outputs, const std::filesystem::path& destination);

}  // namespace roofsim
