#include "roofsim/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "roofsim/csv.hpp"
#include "roofsim/error.hpp"
#include "roofsim/parallel.hpp"

namespace roofsim {

using ojson = nlohmann::ordered_json;

std::uint64_t component_seed(std::uint64_t seed, std::string_view component) {
    return derive_substream_seed(seed, component);
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_rows(std::size_t n_records,
                                                                         const SplitConfig& split,
                                                                         std::uint64_t seed) {
    if (split.n_train + split.n_test != n_records) {
        throw ConfigError("split sizes do not add up to the number of records");
    }
    std::vector<std::size_t> order(n_records);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (split.rule == SplitRule::seeded_shuffle) {
        Rng rng(seed, "split");
        for (std::size_t i = n_records; i > 1; --i) {
            std::swap(order[i - 1], order[rng.below(i)]);
        }
    }
    std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(split.n_train));
    std::vector<std::size_t> test(order.begin() + static_cast<std::ptrdiff_t>(split.n_train), order.end());
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {std::move(train), std::move(test)};
}

Dataset generate_dataset(const ExperimentConfig& config, std::uint64_t seed) {
    GenerationConfig generation = config.generation;
    generation.master_seed = seed;
    Dataset dataset;
    dataset.records = generate_policies(generation, config.threads);
    assign_roof_health(dataset.records, generation.thresholds);
    dataset.coeffs = loss_coefficients(generation);
    const auto outcomes = simulate_losses(dataset.records, dataset.coeffs, seed, config.threads);
    apply_losses(dataset.records, outcomes);
    std::tie(dataset.train_rows, dataset.test_rows) = split_rows(dataset.records.size(), config.split, seed);
    dataset.check_split();
    return dataset;
}

namespace {

std::string generation_timestamp() {
    std::time_t now = std::time(nullptr);
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
        now = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
    }
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buffer[32];
    std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buffer;
}

std::vector<PolicyRecord> rows_of(const Dataset& dataset, const std::vector<std::size_t>& rows) {
    std::vector<PolicyRecord> out;
    out.reserve(rows.size());
    for (auto i : rows) {
        out.push_back(dataset.records[i]);
    }
    return out;
}

void check_released_file(const std::filesystem::path& path, bool allow_target) {
    const auto table = csv::read_table_file(path);
    const auto leaked = hidden_columns_in(table.header, allow_target);
    if (!leaked.empty()) {
        throw ValidationError(path.string() + " exposes hidden column " + leaked.front());
    }
}

}  // namespace

void write_dataset_files(const Dataset& dataset, const std::filesystem::path& dir, const std::string& fingerprint,
                         std::uint64_t seed) {
    const auto train = rows_of(dataset, dataset.train_rows);
    const auto test = rows_of(dataset, dataset.test_rows);
    export_policy_table(train, dir / "train.csv", Visibility::train);
    export_policy_table(test, dir / "test.csv", Visibility::released);
    std::string answers = "PolicyID,NextYearLoss\n";
    for (const auto& r : test) {
        answers += r.policy_id + "," + csv::format_fixed(r.next_year_loss.value_or(0.0), 2) + "\n";
    }
    csv::write_file(dir / "answers.csv", answers);
    export_policy_table(dataset.records, dir / "policies_full.csv", Visibility::full);

    ojson manifest;
    manifest["config_fingerprint"] = fingerprint;
    manifest["master_seed"] = seed;
    manifest["prng"] = kPrngId;
    manifest["generated_at"] = generation_timestamp();
    manifest["n_policies"] = dataset.records.size();
    manifest["n_train"] = train.size();
    manifest["n_test"] = test.size();
    manifest["files"] = {{"train", "train.csv"},
                         {"test", "test.csv"},
                         {"answers", "answers.csv"},
                         {"full", "policies_full.csv"}};
    csv::write_file(dir / "dataset_manifest.json", manifest.dump(2) + "\n");

    check_released_file(dir / "test.csv", false);
    check_released_file(dir / "train.csv", true);
}

ChannelSet compute_channels(const Dataset& dataset, const ExperimentConfig& config, std::uint64_t seed) {
    ChannelSet set;
    set.prompts = generate_prompts(dataset.records, config.descriptors, component_seed(seed, "channel:prompts"));
    const auto& th = config.generation.thresholds;
    const std::array<double, 3> proportions{th.fair_percentile / 100.0,
                                            (th.bad_percentile - th.fair_percentile) / 100.0,
                                            1.0 - th.bad_percentile / 100.0};
    for (const auto& tier : config.tiers) {
        const std::string tier_label = "channel:" + std::string(to_string(tier.name));
        switch (tier.name) {
            case TierName::true_label:
                set.by_tier[tier.name] = true_label_channel(dataset.records);
                break;
            case TierName::noisy_label: {
                double accuracy = 0.0;
                if (tier.accuracy) {
                    accuracy = *tier.accuracy;
                } else {
                    accuracy = calibrate_labeler(tier.target_correlation, tier.confusion_mode, proportions,
                                                 component_seed(seed, "calibration"), config.calibration_batch)
                                   .accuracy;
                }
                set.labeler_accuracy[tier.name] = accuracy;
                set.by_tier[tier.name] =
                    noisy_label_channel(dataset.records, accuracy, tier.confusion_mode, component_seed(seed, tier_label));
                break;
            }
            case TierName::embedding_features:
                set.by_tier[tier.name] =
                    embedding_channel(dataset.records, tier.embedding, component_seed(seed, tier_label));
                break;
            case TierName::cluster_labels: {
                const auto embeddings =
                    embedding_channel(dataset.records, tier.embedding, component_seed(seed, tier_label));
                set.by_tier[tier.name] =
                    cluster_channel(embeddings, tier.cluster_k, component_seed(seed, tier_label + ":kmeans"));
                break;
            }
            default:
                break;
        }
    }
    return set;
}

const TierResult* SeedReport::find(TierName name) const {
    for (const auto& t : tiers) {
        if (t.name == name) {
            return &t;
        }
    }
    return nullptr;
}

const TierSummary* SeedSummary::find(TierName name) const {
    for (const auto& t : tiers) {
        if (t.name == name) {
            return &t;
        }
    }
    return nullptr;
}

namespace {

ojson optional_number(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

std::optional<double> read_optional_number(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) {
        return std::nullopt;
    }
    return j.at(key).get<double>();
}

constexpr std::string_view kSubstituteNotice =
    "substitute channel: emulated image-derived information, not a replication of an image pipeline";

std::string format_number(std::optional<double> v, int decimals = 4) {
    return v ? csv::format_fixed(*v, decimals) : std::string("—");
}

std::string pad_right(std::string text, std::size_t width) {
    // Width in code points.
    std::size_t visible = 0;
    for (unsigned char c : text) {
        if ((c & 0xC0) != 0x80) {
            ++visible;
        }
    }
    if (visible < width) {
        text.append(width - visible, ' ');
    }
    return text;
}

enum class Group { generic, image_use, oracle };

Group group_of(TierName name) {
    if (name == TierName::tabular_only) {
        return Group::generic;
    }
    return name == TierName::oracle ? Group::oracle : Group::image_use;
}

std::string_view group_title(Group g) {
    switch (g) {
        case Group::generic: return "Generic pipeline (tabular only)";
        case Group::image_use: return "Domain knowledge (image-derived information)";
        case Group::oracle: return "Oracle (best achievable)";
    }
    return "";
}

template <class Row>
std::string grouped_table(const std::vector<Row>& rows, const std::string& heading,
                          const std::vector<std::string>& value_headers) {
    constexpr std::size_t name_width = 54;
    constexpr std::size_t value_width = 18;
    std::string out = heading + "\n";
    std::string header = pad_right("Method", name_width);
    for (const auto& h : value_headers) {
        header += pad_right(h, value_width);
    }
    out += header + "\n" + std::string(name_width + value_width * value_headers.size(), '-') + "\n";
    std::optional<Group> current;
    bool any_substitute = false;
    for (const auto& row : rows) {
        const Group g = group_of(row.name);
        if (!current || *current != g) {
            out += std::string(group_title(g)) + "\n";
            current = g;
        }
        any_substitute = any_substitute || is_substitute_channel(row.name);
        std::string line = pad_right("  " + std::string(tier_display_name(row.name)), name_width);
        for (const auto& v : row.values) {
            line += pad_right(v, value_width);
        }
        out += line + "\n";
    }
    if (any_substitute) {
        out += "\n[substitute] " + std::string(kSubstituteNotice) + ".\n";
    }
    return out;
}

struct TableRow {
    TierName name;
    std::vector<std::string> values;
};

}  // namespace

ojson to_json(const SeedReport& report) {
    ojson j;
    j["seed"] = report.seed;
    j["config_fingerprint"] = report.fingerprint;
    j["prng"] = kPrngId;
    if (report.error) {
        j["error"] = {{"stage", report.failed_stage}, {"message", *report.error}};
        return j;
    }
    j["roof_health_counts"] = {{"Good", report.class_counts[0]},
                               {"Fair", report.class_counts[1]},
                               {"Bad", report.class_counts[2]}};
    j["cutpoints"] = {{"fair", report.cutpoints.fair_cut}, {"bad", report.cutpoints.bad_cut}};
    auto& tiers = j["tiers"] = ojson::array();
    for (const auto& t : report.tiers) {
        ojson tj;
        tj["name"] = to_string(t.name);
        tj["method"] = tier_display_name(t.name);
        tj["normalized_gini"] = t.gini.normalized;
        tj["raw_gini"] = t.gini.raw;
        tj["perfect_raw_gini"] = t.gini.perfect_raw;
        tj["n_test"] = t.gini.n;
        tj["tie_policy"] = to_string(t.gini.tie_policy);
        tj["normalized_gini_average_ties"] = t.gini_average_ties;
        tj["channel_correlation"] = optional_number(t.metadata.channel_correlation);
        tj["aligned_correlation"] = optional_number(t.metadata.aligned_correlation);
        tj["labeler_accuracy"] = optional_number(t.metadata.labeler_accuracy);
        tj["n_features"] = t.metadata.n_features;
        tj["channel_params_hash"] = t.metadata.channel_params_hash;
        tj["substitute"] = t.metadata.substitute;
        if (t.metadata.substitute) {
            tj["notice"] = kSubstituteNotice;
        }
        tiers.push_back(std::move(tj));
    }
    return j;
}

SeedReport seed_report_from_json(const nlohmann::json& j) {
    SeedReport r;
    try {
        r.seed = j.at("seed").get<std::uint64_t>();
        r.fingerprint = j.at("config_fingerprint").get<std::string>();
        if (j.contains("error")) {
            r.error = j.at("error").at("message").get<std::string>();
            r.failed_stage = j.at("error").at("stage").get<std::string>();
            return r;
        }
        const auto& counts = j.at("roof_health_counts");
        r.class_counts = {counts.at("Good").get<std::size_t>(), counts.at("Fair").get<std::size_t>(),
                          counts.at("Bad").get<std::size_t>()};
        r.cutpoints = {j.at("cutpoints").at("fair").get<double>(), j.at("cutpoints").at("bad").get<double>()};
        for (const auto& tj : j.at("tiers")) {
            TierResult t;
            t.name = tier_name_from_string(tj.at("name").get<std::string>());
            t.gini.normalized = tj.at("normalized_gini").get<double>();
            t.gini.raw = tj.at("raw_gini").get<double>();
            t.gini.perfect_raw = tj.at("perfect_raw_gini").get<double>();
            t.gini.n = tj.at("n_test").get<std::size_t>();
            t.gini.tie_policy = tie_policy_from_string(tj.at("tie_policy").get<std::string>());
            t.gini_average_ties = tj.at("normalized_gini_average_ties").get<double>();
            t.metadata.name = t.name;
            t.metadata.channel_correlation = read_optional_number(tj, "channel_correlation");
            t.metadata.aligned_correlation = read_optional_number(tj, "aligned_correlation");
            t.metadata.labeler_accuracy = read_optional_number(tj, "labeler_accuracy");
            t.metadata.n_features = tj.at("n_features").get<std::size_t>();
            t.metadata.channel_params_hash = tj.at("channel_params_hash").get<std::string>();
            t.metadata.substitute = tj.at("substitute").get<bool>();
            r.tiers.push_back(std::move(t));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed seed report: ") + e.what());
    }
    return r;
}

std::string format_report_table(const SeedReport& report) {
    const std::string heading = "Normalized Gini, seed " + std::to_string(report.seed) + " (config " +
                                report.fingerprint + ")";
    if (report.error) {
        return heading + "\nFAILED at stage " + report.failed_stage + ": " + *report.error + "\n";
    }
    std::vector<TableRow> rows;
    for (const auto& t : report.tiers) {
        rows.push_back({t.name, {format_number(t.metadata.channel_correlation), format_number(t.gini.normalized)}});
    }
    return grouped_table(rows, heading, {"Corr.", "Normalized Gini"});
}

std::vector<std::string> ladder_violations(const std::map<TierName, double>& gini) {
    std::vector<std::string> violations;
    auto check = [&](TierName lower, TierName upper, double slack, const char* op) {
        const auto lo = gini.find(lower);
        const auto hi = gini.find(upper);
        if (lo == gini.end() || hi == gini.end()) {
            return;
        }
        const bool ok = slack > 0.0 ? lo->second <= hi->second + slack : lo->second < hi->second;
        if (!ok) {
            violations.push_back(std::string(to_string(lower)) + " " + op + " " + std::string(to_string(upper)));
        }
    };
    check(TierName::tabular_only, TierName::cluster_labels, 0.0, "<");
    check(TierName::cluster_labels, TierName::noisy_label, 0.0, "<");
    check(TierName::cluster_labels, TierName::embedding_features, 0.0, "<");
    check(TierName::noisy_label, TierName::true_label, 0.0, "<");
    check(TierName::embedding_features, TierName::true_label, 0.0, "<");
    check(TierName::true_label, TierName::oracle, 0.01, "<= 0.01 +");
    return violations;
}

SeedSummary summarize_seeds(const std::vector<SeedReport>& reports) {
    std::vector<const SeedReport*> ok;
    for (const auto& r : reports) {
        if (!r.error) {
            ok.push_back(&r);
        }
    }
    if (ok.empty()) {
        throw UsageError("summarize_seeds: no successful seed reports");
    }
    std::vector<TierName> names;
    for (const auto& t : ok.front()->tiers) {
        names.push_back(t.name);
    }
    for (const auto* r : ok) {
        std::vector<TierName> these;
        for (const auto& t : r->tiers) {
            these.push_back(t.name);
        }
        if (these != names) {
            throw UsageError("summarize_seeds: reports have different tier sets");
        }
    }

    SeedSummary summary;
    for (const auto* r : ok) {
        summary.seeds.push_back(r->seed);
        std::map<TierName, double> per_seed;
        for (const auto& t : r->tiers) {
            per_seed[t.name] = t.gini.normalized;
        }
        auto violations = ladder_violations(per_seed);
        if (!violations.empty()) {
            summary.ladder_deviations[r->seed] = std::move(violations);
        }
    }
    for (std::size_t i = 0; i < names.size(); ++i) {
        TierSummary s;
        s.name = names[i];
        s.n_seeds = ok.size();
        double total = 0.0;
        double corr_total = 0.0;
        bool has_corr = true;
        for (const auto* r : ok) {
            total += r->tiers[i].gini.normalized;
            if (r->tiers[i].metadata.channel_correlation) {
                corr_total += *r->tiers[i].metadata.channel_correlation;
            } else {
                has_corr = false;
            }
        }
        const double n = static_cast<double>(ok.size());
        s.mean = total / n;
        if (has_corr) {
            s.mean_correlation = corr_total / n;
        }
        if (ok.size() > 1) {
            double ss = 0.0;
            for (const auto* r : ok) {
                const double d = r->tiers[i].gini.normalized - s.mean;
                ss += d * d;
            }
            s.stddev = std::sqrt(ss / (n - 1.0));
        }
        summary.tiers.push_back(s);
    }
    return summary;
}

ojson to_json(const SeedSummary& summary) {
    ojson j;
    j["seeds"] = summary.seeds;
    auto& tiers = j["tiers"] = ojson::array();
    for (const auto& t : summary.tiers) {
        tiers.push_back({{"name", to_string(t.name)},
                         {"method", tier_display_name(t.name)},
                         {"mean_normalized_gini", t.mean},
                         {"std_normalized_gini", t.stddev},
                         {"mean_channel_correlation", optional_number(t.mean_correlation)},
                         {"n_seeds", t.n_seeds},
                         {"substitute", is_substitute_channel(t.name)}});
    }
    auto& deviations = j["ladder_deviations"] = ojson::object();
    for (const auto& [seed, v] : summary.ladder_deviations) {
        deviations[std::to_string(seed)] = v;
    }
    return j;
}

std::string format_summary_table(const SeedSummary& summary) {
    std::vector<TableRow> rows;
    for (const auto& t : summary.tiers) {
        rows.push_back({t.name,
                        {format_number(t.mean_correlation),
                         csv::format_fixed(t.mean, 4) + " ± " + csv::format_fixed(t.stddev, 4)}});
    }
    std::string out = grouped_table(rows, "Normalized Gini over " + std::to_string(summary.seeds.size()) + " seed(s)",
                                    {"Mean Corr.", "Normalized Gini"});
    if (!summary.ladder_deviations.empty()) {
        out += "\nLadder deviations:\n";
        for (const auto& [seed, v] : summary.ladder_deviations) {
            out += "  seed " + std::to_string(seed) + ":";
            for (const auto& s : v) {
                out += " [" + s + "]";
            }
            out += "\n";
        }
    }
    return out;
}

namespace {

std::string predictions_csv(const TierRun& run) {
    std::string out = "PolicyID,Prediction\n";
    for (std::size_t i = 0; i < run.test_ids.size(); ++i) {
        out += run.test_ids[i] + "," + csv::format_shortest(run.predictions[i]) + "\n";
    }
    return out;
}

}  // namespace

SeedReport run_seed(const ExperimentConfig& config, std::uint64_t seed, const std::optional<std::filesystem::path>& dir) {
    SeedReport report;
    report.seed = seed;
    report.fingerprint = config_fingerprint(config);
    std::string stage = "generate";
    ojson timings = ojson::object();
    try {
        const auto t0 = std::chrono::steady_clock::now();
        const Dataset dataset = generate_dataset(config, seed);
        timings["generate"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (const auto& r : dataset.records) {
            ++report.class_counts[static_cast<std::size_t>(ordinal(*r.roof_health))];
        }
        {
            std::vector<double> scores;
            for (const auto& r : dataset.records) {
                scores.push_back(r.latent_score);
            }
            std::sort(scores.begin(), scores.end());
            report.cutpoints = {nearest_rank_percentile(scores, config.generation.thresholds.fair_percentile),
                                nearest_rank_percentile(scores, config.generation.thresholds.bad_percentile)};
        }
        if (dir) {
            stage = "write_datasets";
            write_dataset_files(dataset, *dir, report.fingerprint, seed);
        }

        stage = "channels";
        const auto channels = compute_channels(dataset, config, seed);
        if (dir) {
            write_prompt_manifest(channels.prompts, *dir / "prompts.jsonl");
            for (const auto& [name, outputs] : channels.by_tier) {
                write_channel_csv(outputs, *dir / "channels" / (std::string(to_string(name)) + ".csv"));
            }
        }

        std::vector<double> answers;
        for (auto i : dataset.test_rows) {
            answers.push_back(*dataset.records[i].next_year_loss);
        }

        for (const auto& tier : config.tiers) {
            stage = "tier:" + std::string(to_string(tier.name));
            const auto start = std::chrono::steady_clock::now();
            ForestParams forest = config.forest;
            forest.seed = component_seed(seed, "forest:" + std::string(to_string(tier.name)));
            static const std::vector<ChannelOutput> kNoChannel;
            const auto it = channels.by_tier.find(tier.name);
            const auto& channel = it == channels.by_tier.end() ? kNoChannel : it->second;
            TierRun run = run_tier(dataset, tier, channel, forest, config.metrics.correlation, config.threads);
            if (auto acc = channels.labeler_accuracy.find(tier.name); acc != channels.labeler_accuracy.end()) {
                run.metadata.labeler_accuracy = acc->second;
            }

            TierResult result;
            result.name = tier.name;
            result.metadata = run.metadata;
            result.gini = normalized_gini(answers, run.predictions, config.metrics.tie_policy);
            result.gini_average_ties = normalized_gini(answers, run.predictions, TiePolicy::average).normalized;
            result.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            timings[std::string(to_string(tier.name))] = result.runtime_seconds;
            report.tiers.push_back(std::move(result));
            if (dir) {
                csv::write_file(*dir / "predictions" / (std::string(to_string(tier.name)) + ".csv"),
                                predictions_csv(run));
            }
        }
    } catch (const std::exception& e) {
        report.error = e.what();
        report.failed_stage = stage;
        report.tiers.clear();
    }
    if (dir) {
        csv::write_file(*dir / "report.json", to_json(report).dump(2) + "\n");
        csv::write_file(*dir / "report.txt", format_report_table(report));
        csv::write_file(*dir / "timings.json", timings.dump(2) + "\n");
    }
    return report;
}

EvaluationReport run_experiment(const ExperimentConfig& config, bool write_files) {
    config.validate();
    EvaluationReport result;
    result.fingerprint = config_fingerprint(config);
    result.directory = config.output_dir / result.fingerprint;

    const std::size_t total_threads = config.threads == 0 ? default_threads() : config.threads;
    const std::size_t seed_workers = std::min(total_threads, config.seeds.size());
    ExperimentConfig inner = config;
    inner.threads = std::max<std::size_t>(1, total_threads / std::max<std::size_t>(1, seed_workers));

    result.seeds.resize(config.seeds.size());
    parallel_for(
        config.seeds.size(),
        [&](std::size_t i) {
            const auto seed = config.seeds[i];
            std::optional<std::filesystem::path> dir;
            if (write_files) {
                dir = result.directory / ("seed-" + std::to_string(seed));
            }
            result.seeds[i] = run_seed(inner, seed, dir);
        },
        seed_workers);

    bool any_ok = std::any_of(result.seeds.begin(), result.seeds.end(), [](const SeedReport& r) { return !r.error; });
    if (any_ok) {
        result.summary = summarize_seeds(result.seeds);
    }
    if (write_files) {
        ojson aggregate;
        aggregate["config_fingerprint"] = result.fingerprint;
        aggregate["prng"] = kPrngId;
        aggregate["summary"] = any_ok ? to_json(result.summary) : ojson(nullptr);
        auto& failures = aggregate["failed_seeds"] = ojson::array();
        for (const auto& r : result.seeds) {
            if (r.error) {
                failures.push_back({{"seed", r.seed}, {"stage", r.failed_stage}, {"message", *r.error}});
            }
        }
        csv::write_file(result.directory / "aggregate.json", aggregate.dump(2) + "\n");
        csv::write_file(result.directory / "aggregate.txt",
                        any_ok ? format_summary_table(result.summary) : std::string("all seeds failed\n"));
        csv::write_file(result.directory / "config.json", to_json(config).dump(2) + "\n");
    }
    return result;
}

namespace {

std::unordered_map<std::string, double> read_id_value_file(const std::filesystem::path& path,
                                                           std::string_view value_column,
                                                           std::vector<std::string>& order) {
    const auto table = csv::read_table_file(path);
    const auto id_col = table.column("PolicyID");
    const auto value_col = table.column(value_column);
    std::unordered_map<std::string, double> values;
    std::vector<std::string> duplicates;
    for (const auto& row : table.rows) {
        const double v = csv::parse_double(row[value_col], path.string());
        if (!values.emplace(row[id_col], v).second) {
            duplicates.push_back(row[id_col]);
        } else {
            order.push_back(row[id_col]);
        }
    }
    if (!duplicates.empty()) {
        std::string msg = path.string() + ": duplicate PolicyID";
        for (std::size_t i = 0; i < duplicates.size() && i < 10; ++i) {
            msg += " " + duplicates[i];
        }
        throw ValidationError(msg);
    }
    return values;
}

}  // namespace

ScoreResult score_submission(const std::filesystem::path& predictions_file, const std::filesystem::path& answers_file,
                             const MetricOptions& options) {
    std::vector<std::string> prediction_order;
    std::vector<std::string> answer_order;
    const auto predictions = read_id_value_file(predictions_file, "Prediction", prediction_order);
    const auto answers = read_id_value_file(answers_file, "NextYearLoss", answer_order);

    std::vector<std::string> missing;
    std::vector<std::string> extra;
    for (const auto& id : answer_order) {
        if (!predictions.contains(id)) {
            missing.push_back(id);
        }
    }
    for (const auto& id : prediction_order) {
        if (!answers.contains(id)) {
            extra.push_back(id);
        }
    }
    if (!missing.empty() || !extra.empty()) {
        std::string msg = "policy ids differ between predictions and answers;";
        auto list = [&](const char* what, const std::vector<std::string>& ids) {
            if (ids.empty()) {
                return;
            }
            msg += std::string(" ") + what + " (" + std::to_string(ids.size()) + "):";
            for (std::size_t i = 0; i < ids.size() && i < 10; ++i) {
                msg += " " + ids[i];
            }
        };
        list("missing from predictions", missing);
        list("not in answers", extra);
        throw ValidationError(msg);
    }

    std::vector<double> y;
    std::vector<double> y_hat;
    for (const auto& id : answer_order) {
        y.push_back(answers.at(id));
        y_hat.push_back(predictions.at(id));
    }
    ScoreResult result;
    result.gini = normalized_gini(y, y_hat, options.tie_policy);
    if (std::adjacent_find(y_hat.begin(), y_hat.end(), std::not_equal_to<>()) == y_hat.end()) {
        result.warnings.push_back("constant predictions: the score reflects only the tie policy (" +
                                  std::string(to_string(options.tie_policy)) + ")");
    }
    return result;
}

ojson to_json(const ScoreResult& result) {
    ojson j;
    j["normalized_gini"] = result.gini.normalized;
    j["raw_gini"] = result.gini.raw;
    j["perfect_raw_gini"] = result.gini.perfect_raw;
    j["n"] = result.gini.n;
    j["tie_policy"] = to_string(result.gini.tie_policy);
    j["warnings"] = result.warnings;
    return j;
}

}  // namespace roofsim
