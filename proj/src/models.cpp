#include "roofsim/models.hpp"

#include <algorithm>
#include <set>

#include "roofsim/error.hpp"

namespace roofsim {

std::string_view to_string(TierName name) noexcept {
    switch (name) {
        case TierName::tabular_only: return "tabular_only";
        case TierName::cluster_labels: return "cluster_labels";
        case TierName::embedding_features: return "embedding_features";
        case TierName::noisy_label: return "noisy_label";
        case TierName::true_label: return "true_label";
        case TierName::oracle: return "oracle";
    }
    return "?";
}

TierName tier_name_from_string(std::string_view text) {
    for (auto t : kAllTiers) {
        if (to_string(t) == text) {
            return t;
        }
    }
    throw ConfigError("unknown tier '" + std::string(text) + "'");
}

std::string_view tier_display_name(TierName name) noexcept {
    switch (name) {
        case TierName::tabular_only: return "RF (tabular only)";
        case TierName::cluster_labels: return "RF + embedding clustered as k labels [substitute]";
        case TierName::embedding_features: return "RF + embedding features [substitute]";
        case TierName::noisy_label: return "RF + noisy extracted RoofHealth [substitute]";
        case TierName::true_label: return "RF + true RoofHealth";
        case TierName::oracle: return "Oracle (Bayes-optimal expected loss)";
    }
    return "?";
}

bool is_substitute_channel(TierName name) noexcept {
    return name == TierName::cluster_labels || name == TierName::embedding_features || name == TierName::noisy_label;
}

std::string_view to_string(Encoding encoding) noexcept {
    return encoding == Encoding::one_hot ? "one_hot" : "ordinal";
}

Encoding encoding_from_string(std::string_view text) {
    if (text == "one_hot") {
        return Encoding::one_hot;
    }
    if (text == "ordinal") {
        return Encoding::ordinal;
    }
    throw ConfigError("unknown encoding '" + std::string(text) + "'");
}

FeatureMatrix assemble_features(std::span<const PolicyRecord> records, std::span<const ChannelOutput> channel,
                                const TierSpec& tier) {
    if (tier.name == TierName::oracle) {
        throw UsageError("the oracle tier does not use a feature matrix");
    }
    if (tier.needs_channel() && channel.size() != records.size()) {
        throw UsageError("tier " + std::string(to_string(tier.name)) + " needs channel outputs for every record");
    }

    FeatureMatrix m;
    m.columns = {"HouseValue", "HouseAge", "WallTypeIsWood", "AreaRisk", "CreditScore"};
    std::size_t dim = 0;
    switch (tier.name) {
        case TierName::cluster_labels:
            if (tier.encoding == Encoding::one_hot) {
                for (std::size_t c = 0; c < tier.cluster_k; ++c) {
                    m.columns.push_back("Cluster" + std::to_string(c));
                }
            } else {
                m.columns.emplace_back("ClusterId");
            }
            break;
        case TierName::embedding_features:
            if (!channel.empty() && channel.front().embedding) {
                dim = channel.front().embedding->size();
            }
            for (std::size_t j = 0; j < dim; ++j) {
                m.columns.push_back("E" + std::to_string(j));
            }
            break;
        case TierName::noisy_label:
        case TierName::true_label:
            if (tier.encoding == Encoding::one_hot) {
                m.columns.insert(m.columns.end(), {"RoofGood", "RoofFair", "RoofBad"});
            } else {
                m.columns.emplace_back("RoofHealthCode");
            }
            break;
        default:
            break;
    }

    const bool labeled = std::all_of(records.begin(), records.end(),
                                     [](const PolicyRecord& r) { return r.next_year_loss.has_value(); });
    m.values.reserve(records.size() * m.columns.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        m.policy_ids.push_back(r.policy_id);
        m.values.insert(m.values.end(), {r.house_value, r.house_age, r.wall_type == WallType::Wood ? 1.0 : 0.0,
                                         r.area_risk, static_cast<double>(r.credit_score)});
        if (!tier.needs_channel()) {
            continue;
        }
        const auto& c = channel[i];
        if (c.policy_id != r.policy_id) {
            throw UsageError("channel output order does not match records at " + r.policy_id);
        }
        switch (tier.name) {
            case TierName::cluster_labels: {
                if (!c.cluster_id || *c.cluster_id < 0 || static_cast<std::size_t>(*c.cluster_id) >= tier.cluster_k) {
                    throw UsageError("missing or out-of-range cluster id for " + r.policy_id);
                }
                if (tier.encoding == Encoding::one_hot) {
                    for (std::size_t k = 0; k < tier.cluster_k; ++k) {
                        m.values.push_back(static_cast<std::size_t>(*c.cluster_id) == k ? 1.0 : 0.0);
                    }
                } else {
                    m.values.push_back(static_cast<double>(*c.cluster_id));
                }
                break;
            }
            case TierName::embedding_features:
                if (!c.embedding || c.embedding->size() != dim) {
                    throw UsageError("missing or inconsistent embedding for " + r.policy_id);
                }
                m.values.insert(m.values.end(), c.embedding->begin(), c.embedding->end());
                break;
            default: {
                if (!c.predicted_label) {
                    throw UsageError("missing channel label for " + r.policy_id);
                }
                const int code = ordinal(*c.predicted_label);
                if (tier.encoding == Encoding::one_hot) {
                    for (int k = 0; k < 3; ++k) {
                        m.values.push_back(code == k ? 1.0 : 0.0);
                    }
                } else {
                    m.values.push_back(static_cast<double>(code));
                }
                break;
            }
        }
    }
    if (labeled) {
        for (const auto& r : records) {
            m.target.push_back(*r.next_year_loss);
        }
    }
    return m;
}

void Dataset::check_split() const {
    std::set<std::string> train_ids;
    for (auto i : train_rows) {
        if (i >= records.size()) {
            throw IntegrityError("train row out of range");
        }
        train_ids.insert(records[i].policy_id);
    }
    for (auto i : test_rows) {
        if (i >= records.size()) {
            throw IntegrityError("test row out of range");
        }
        if (train_ids.contains(records[i].policy_id)) {
            throw IntegrityError("policy " + records[i].policy_id + " is in both train and test");
        }
    }
}

namespace {

template <class T>
std::vector<T> select(std::span<const T> items, const std::vector<std::size_t>& rows) {
    std::vector<T> out;
    out.reserve(rows.size());
    for (auto i : rows) {
        out.push_back(items[i]);
    }
    return out;
}

}  // namespace

TierRun run_tier(const Dataset& dataset, const TierSpec& tier, std::span<const ChannelOutput> channel,
                 const ForestParams& forest, CorrelationKind correlation, std::size_t threads) {
    dataset.check_split();
    const std::span<const PolicyRecord> all(dataset.records);
    const auto test_records = select(all, dataset.test_rows);

    TierRun run;
    run.metadata.name = tier.name;
    run.metadata.substitute = is_substitute_channel(tier.name);
    for (const auto& r : test_records) {
        run.test_ids.push_back(r.policy_id);
    }

    std::vector<RoofHealth> truth;
    truth.reserve(all.size());
    for (const auto& r : all) {
        if (!r.roof_health) {
            throw UsageError("run_tier: roof health not assigned for " + r.policy_id);
        }
        truth.push_back(*r.roof_health);
    }

    if (tier.name == TierName::oracle) {
        for (const auto& p : oracle_predict(test_records, dataset.coeffs)) {
            run.predictions.push_back(p.expected_loss);
        }
        run.metadata.channel_correlation = 1.0;
        return run;
    }

    if (tier.needs_channel()) {
        if (channel.size() != all.size()) {
            throw UsageError("run_tier: channel must cover every record");
        }
        run.metadata.channel_params_hash = channel.front().channel_params_hash;
    }
    switch (tier.name) {
        case TierName::cluster_labels: {
            std::vector<int> ids;
            for (const auto& c : channel) {
                ids.push_back(c.cluster_id.value_or(0));
            }
            run.metadata.channel_correlation = raw_cluster_correlation(ids, truth);
            run.metadata.aligned_correlation = aligned_cluster_correlation(ids, truth, tier.cluster_k);
            break;
        }
        case TierName::noisy_label:
        case TierName::true_label:
            run.metadata.channel_correlation = label_channel_correlation(channel, all, correlation);
            break;
        default:
            break;
    }

    const auto train_records = select(all, dataset.train_rows);
    const auto train_channel = tier.needs_channel() ? select(channel, dataset.train_rows) : std::vector<ChannelOutput>{};
    const auto test_channel = tier.needs_channel() ? select(channel, dataset.test_rows) : std::vector<ChannelOutput>{};
    const auto train = assemble_features(train_records, train_channel, tier);
    auto test = assemble_features(test_records, test_channel, tier);
    if (train.target.size() != train.rows()) {
        throw UsageError("run_tier: training rows lack NextYearLoss");
    }
    run.metadata.n_features = train.cols();
    const auto model = fit_forest(train, forest, threads);
    run.predictions = predict_forest(model, test, threads);
    return run;
}

}  // namespace roofsim
