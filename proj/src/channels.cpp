#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "roofsim/csv.hpp"
#include "roofsim/error.hpp"
#include "roofsim/roof_channel.hpp"

namespace roofsim {

namespace {

std::string params_hash(const std::string& canonical) {
    char buffer[17];
    std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical)));
    return buffer;
}

}  // namespace

std::string_view to_string(ChannelName name) noexcept {
    switch (name) {
        case ChannelName::true_label: return "true_label";
        case ChannelName::noisy_label: return "noisy_label";
        case ChannelName::embedding: return "embedding";
        case ChannelName::cluster: return "cluster";
    }
    return "?";
}

std::string_view to_string(ConfusionMode mode) noexcept {
    return mode == ConfusionMode::uniform ? "uniform" : "adjacent";
}

ConfusionMode confusion_mode_from_string(std::string_view text) {
    if (text == "uniform") {
        return ConfusionMode::uniform;
    }
    if (text == "adjacent") {
        return ConfusionMode::adjacent;
    }
    throw ConfigError("unknown confusion mode '" + std::string(text) + "'");
}

std::vector<ChannelOutput> true_label_channel(std::span<const PolicyRecord> records) {
    std::vector<ChannelOutput> out;
    out.reserve(records.size());
    const auto hash = params_hash("true_label");
    for (const auto& r : records) {
        if (!r.roof_health) {
            throw UsageError("true_label_channel: roof health not assigned for " + r.policy_id);
        }
        ChannelOutput o;
        o.policy_id = r.policy_id;
        o.predicted_label = r.roof_health;
        o.channel_name = ChannelName::true_label;
        o.channel_params_hash = hash;
        out.push_back(std::move(o));
    }
    return out;
}

double wrong_label_probability(RoofHealth truth, RoofHealth reported, ConfusionMode mode) {
    if (truth == reported) {
        return 0.0;
    }
    if (mode == ConfusionMode::uniform) {
        return 0.5;
    }
    auto weight = [&](RoofHealth other) { return std::abs(ordinal(other) - ordinal(truth)) == 2 ? 0.5 : 1.0; };
    double total = 0.0;
    for (auto rh : kAllRoofHealth) {
        if (rh != truth) {
            total += weight(rh);
        }
    }
    return weight(reported) / total;
}

RoofHealth noisy_label(RoofHealth truth, double accuracy, ConfusionMode mode, double u_keep, double u_wrong) {
    if (u_keep < accuracy) {
        return truth;
    }
    double cumulative = 0.0;
    RoofHealth last = truth;
    for (auto rh : kAllRoofHealth) {
        if (rh == truth) {
            continue;
        }
        cumulative += wrong_label_probability(truth, rh, mode);
        last = rh;
        if (u_wrong < cumulative) {
            return rh;
        }
    }
    return last;
}

namespace {

void check_accuracy(double accuracy) {
    if (!(accuracy >= 1.0 / 3.0 - 1e-12 && accuracy <= 1.0)) {
        throw ParameterError("labeler accuracy must lie in [1/3, 1]");
    }
}

}  // namespace

std::vector<ChannelOutput> noisy_label_channel(std::span<const PolicyRecord> records, double accuracy,
                                               ConfusionMode mode, std::uint64_t seed) {
    check_accuracy(accuracy);
    std::ostringstream canonical;
    canonical.precision(17);
    canonical << "noisy_label;accuracy=" << accuracy << ";mode=" << to_string(mode) << ";seed=" << seed;
    const auto hash = params_hash(canonical.str());

    std::vector<ChannelOutput> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        if (!r.roof_health) {
            throw UsageError("noisy_label_channel: roof health not assigned for " + r.policy_id);
        }
        Rng rng(seed, "noisy:" + r.policy_id);
        const double u_keep = rng.uniform();
        const double u_wrong = rng.uniform();
        ChannelOutput o;
        o.policy_id = r.policy_id;
        o.predicted_label = noisy_label(*r.roof_health, accuracy, mode, u_keep, u_wrong);
        o.channel_name = ChannelName::noisy_label;
        o.channel_params_hash = hash;
        out.push_back(std::move(o));
    }
    return out;
}

CalibrationResult calibrate_labeler(double target_correlation, ConfusionMode mode,
                                    const std::array<double, 3>& class_proportions, std::uint64_t seed,
                                    std::size_t batch_size) {
    if (!(target_correlation > 0.0 && target_correlation <= 1.0)) {
        throw ParameterError("calibration target must lie in (0, 1]");
    }
    validate(Categorical{{"Good", "Fair", "Bad"}, {class_proportions.begin(), class_proportions.end()}});
    if (batch_size < 2) {
        throw ParameterError("calibration batch needs at least two labels");
    }
    if (target_correlation == 1.0) {
        return {1.0, 1.0, 0};
    }

    Rng rng(seed, "calibrate");
    const std::vector<double> probs(class_proportions.begin(), class_proportions.end());
    std::vector<RoofHealth> truth(batch_size);
    std::vector<double> u_keep(batch_size);
    std::vector<double> u_wrong(batch_size);
    for (std::size_t i = 0; i < batch_size; ++i) {
        truth[i] = roof_health_from_ordinal(static_cast<int>(draw_categorical(rng, probs)));
        u_keep[i] = rng.uniform();
        u_wrong[i] = rng.uniform();
    }

    std::vector<RoofHealth> reported(batch_size);
    auto measure = [&](double accuracy) {
        for (std::size_t i = 0; i < batch_size; ++i) {
            reported[i] = noisy_label(truth[i], accuracy, mode, u_keep[i], u_wrong[i]);
        }
        return ordinal_correlation(truth, reported);
    };

    double lo = 1.0 / 3.0;
    double hi = 1.0;
    const double floor_corr = measure(lo);
    if (target_correlation < floor_corr - 0.005) {
        throw CalibrationError("target " + csv::format_shortest(target_correlation) +
                                   " is below the smallest correlation reachable under " +
                                   std::string(to_string(mode)) + " confusion (" + csv::format_shortest(floor_corr) +
                                   ")",
                               floor_corr);
    }

    CalibrationResult result;
    for (int iter = 1; iter <= 40; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double corr = measure(mid);
        result = {mid, corr, iter};
        if (std::abs(corr - target_correlation) <= 0.005) {
            break;
        }
        if (corr < target_correlation) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return result;
}

std::array<std::vector<double>, 3> embedding_directions(std::size_t dim, std::uint64_t seed) {
    if (dim < 2) {
        throw ParameterError("embedding dimension must be at least 2");
    }
    Rng rng(seed, "embedding-basis");
    std::array<std::vector<double>, 3> basis;
    const std::size_t independent = std::min<std::size_t>(3, dim);
    for (std::size_t c = 0; c < 3; ++c) {
        if (c >= independent) {
            // dim == 2: third direction is -(e0 + e1) / sqrt(2).
            basis[c].assign(dim, 0.0);
            for (std::size_t j = 0; j < dim; ++j) {
                basis[c][j] = -(basis[0][j] + basis[1][j]) / std::sqrt(2.0);
            }
            continue;
        }
        for (;;) {
            std::vector<double> v(dim);
            for (auto& x : v) {
                x = draw_normal(rng, 0.0, 1.0);
            }
            for (std::size_t p = 0; p < c; ++p) {
                const double dot = std::inner_product(v.begin(), v.end(), basis[p].begin(), 0.0);
                for (std::size_t j = 0; j < dim; ++j) {
                    v[j] -= dot * basis[p][j];
                }
            }
            const double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
            if (norm > 1e-6) {
                for (auto& x : v) {
                    x /= norm;
                }
                basis[c] = std::move(v);
                break;
            }
        }
    }
    return basis;
}

std::vector<ChannelOutput> embedding_channel(std::span<const PolicyRecord> records, const EmbeddingParams& params,
                                             std::uint64_t seed) {
    if (params.dim < 2) {
        throw ParameterError("embedding dimension must be at least 2");
    }
    if (!(params.class_separation >= 0.0) || !std::isfinite(params.class_separation)) {
        throw ParameterError("class_separation must be finite and nonnegative");
    }
    if (!(params.noise_sigma > 0.0) || !std::isfinite(params.noise_sigma)) {
        throw ParameterError("embedding noise_sigma must be finite and positive");
    }
    const auto basis = embedding_directions(params.dim, seed);
    std::ostringstream canonical;
    canonical.precision(17);
    canonical << "embedding;dim=" << params.dim << ";separation=" << params.class_separation
              << ";sigma=" << params.noise_sigma << ";seed=" << seed;
    const auto hash = params_hash(canonical.str());

    std::vector<ChannelOutput> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        if (!r.roof_health) {
            throw UsageError("embedding_channel: roof health not assigned for " + r.policy_id);
        }
        const auto& direction = basis[static_cast<std::size_t>(ordinal(*r.roof_health))];
        Rng rng(seed, "embedding:" + r.policy_id);
        std::vector<double> e(params.dim);
        for (std::size_t j = 0; j < params.dim; ++j) {
            e[j] = params.class_separation * direction[j] + draw_normal(rng, 0.0, params.noise_sigma);
        }
        ChannelOutput o;
        o.policy_id = r.policy_id;
        o.embedding = std::move(e);
        o.channel_name = ChannelName::embedding;
        o.channel_params_hash = hash;
        out.push_back(std::move(o));
    }
    return out;
}

std::vector<ChannelOutput> cluster_channel(std::span<const ChannelOutput> embeddings, std::size_t k,
                                           std::uint64_t seed) {
    if (k < 2) {
        throw UsageError("cluster_channel: k must be at least 2");
    }
    if (embeddings.size() < k) {
        throw UsageError("cluster_channel: " + std::to_string(embeddings.size()) + " points for " +
                         std::to_string(k) + " clusters");
    }
    const std::size_t dim = embeddings.front().embedding ? embeddings.front().embedding->size() : 0;
    std::vector<double> points;
    points.reserve(embeddings.size() * dim);
    for (const auto& e : embeddings) {
        if (!e.embedding || e.embedding->size() != dim || dim == 0) {
            throw UsageError("cluster_channel: embedding missing or of inconsistent length for " + e.policy_id);
        }
        points.insert(points.end(), e.embedding->begin(), e.embedding->end());
    }
    const auto result = kmeans(points, dim, k, seed);
    const auto hash = params_hash("cluster;k=" + std::to_string(k) + ";seed=" + std::to_string(seed) +
                                  ";input=" + embeddings.front().channel_params_hash);
    std::vector<ChannelOutput> out(embeddings.begin(), embeddings.end());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i].cluster_id = result.assignments[i];
        out[i].channel_name = ChannelName::cluster;
        out[i].channel_params_hash = hash;
    }
    return out;
}

double raw_cluster_correlation(std::span<const int> cluster_ids, std::span<const RoofHealth> truth) {
    if (cluster_ids.size() != truth.size()) {
        throw UsageError("cluster correlation: length mismatch");
    }
    std::vector<double> a(cluster_ids.begin(), cluster_ids.end());
    std::vector<double> b(truth.size());
    std::transform(truth.begin(), truth.end(), b.begin(), [](RoofHealth rh) { return double(ordinal(rh)); });
    return pearson_correlation(a, b);
}

double aligned_cluster_correlation(std::span<const int> cluster_ids, std::span<const RoofHealth> truth, std::size_t k) {
    if (cluster_ids.size() != truth.size()) {
        throw UsageError("cluster correlation: length mismatch");
    }
    std::vector<double> b(truth.size());
    std::transform(truth.begin(), truth.end(), b.begin(), [](RoofHealth rh) { return double(ordinal(rh)); });
    std::vector<double> a(cluster_ids.size());
    auto correlation_under = [&](const std::vector<int>& mapping) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = mapping[static_cast<std::size_t>(cluster_ids[i])];
        }
        try {
            return pearson_correlation(a, b);
        } catch (const UndefinedMetricError&) {
            return 0.0;
        }
    };

    if (k == 3) {
        std::vector<int> mapping{0, 1, 2};
        double best = -1.0;
        do {
            best = std::max(best, correlation_under(mapping));
        } while (std::next_permutation(mapping.begin(), mapping.end()));
        return best;
    }
    std::vector<std::array<std::size_t, 3>> counts(k, {0, 0, 0});
    for (std::size_t i = 0; i < cluster_ids.size(); ++i) {
        ++counts[static_cast<std::size_t>(cluster_ids[i])][static_cast<std::size_t>(ordinal(truth[i]))];
    }
    std::vector<int> mapping(k);
    for (std::size_t c = 0; c < k; ++c) {
        mapping[c] = static_cast<int>(std::max_element(counts[c].begin(), counts[c].end()) - counts[c].begin());
    }
    return correlation_under(mapping);
}

double label_channel_correlation(std::span<const ChannelOutput> outputs, std::span<const PolicyRecord> records,
                                 CorrelationKind kind) {
    if (outputs.size() != records.size()) {
        throw UsageError("label_channel_correlation: length mismatch");
    }
    std::vector<RoofHealth> predicted;
    std::vector<RoofHealth> truth;
    predicted.reserve(outputs.size());
    truth.reserve(outputs.size());
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        if (!outputs[i].predicted_label || !records[i].roof_health || outputs[i].policy_id != records[i].policy_id) {
            throw UsageError("label_channel_correlation: missing label or id mismatch at " + records[i].policy_id);
        }
        predicted.push_back(*outputs[i].predicted_label);
        truth.push_back(*records[i].roof_health);
    }
    return ordinal_correlation(predicted, truth, kind);
}

std::string format_channel_csv(std::span<const ChannelOutput> outputs) {
    std::vector<std::string> header{"PolicyID", "Channel"};
    const bool has_label = !outputs.empty() && outputs.front().predicted_label.has_value();
    const bool has_cluster = !outputs.empty() && outputs.front().cluster_id.has_value();
    const std::size_t dim = (!outputs.empty() && outputs.front().embedding) ? outputs.front().embedding->size() : 0;
    if (has_label) {
        header.emplace_back("PredictedLabel");
    }
    if (has_cluster) {
        header.emplace_back("ClusterId");
    }
    for (std::size_t j = 0; j < dim; ++j) {
        header.push_back("E" + std::to_string(j));
    }
    std::string out = csv::join(header) + '\n';
    for (const auto& o : outputs) {
        std::vector<std::string> fields{o.policy_id, std::string(to_string(o.channel_name))};
        if (has_label) {
            fields.emplace_back(o.predicted_label ? to_string(*o.predicted_label) : "");
        }
        if (has_cluster) {
            fields.push_back(o.cluster_id ? std::to_string(*o.cluster_id) : "");
        }
        for (std::size_t j = 0; j < dim; ++j) {
            fields.push_back(o.embedding && j < o.embedding->size() ? csv::format_fixed((*o.embedding)[j], 6) : "");
        }
        out += csv::join(fields);
        out += '\n';
    }
    return out;
}

void write_channel_csv(std::span<const ChannelOutput> outputs, const std::filesystem::path& destination) {
    csv::write_file(destination, format_channel_csv(outputs));
}

}  // namespace roofsim
