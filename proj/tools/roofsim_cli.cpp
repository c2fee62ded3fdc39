// roofsim: generate synthetic property-insurance datasets, emulate the roof
// image channels, run the tier comparison and score external submissions.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "roofsim/config.hpp"
#include "roofsim/csv.hpp"
#include "roofsim/error.hpp"
#include "roofsim/experiment.hpp"
#include "roofsim/loss.hpp"

namespace fs = std::filesystem;
using namespace roofsim;

namespace {

struct CommonOptions {
    std::string config_path;
    std::vector<std::uint64_t> seeds;
    std::string out_dir = "out";
    std::vector<std::string> tiers;
    std::size_t threads = 0;
};

ExperimentConfig resolve_config(const CommonOptions& opts) {
    ExperimentConfig config =
        opts.config_path.empty() ? ExperimentConfig::defaults() : load_experiment_config(opts.config_path);
    if (!opts.seeds.empty()) {
        config.seeds = opts.seeds;
    }
    config.output_dir = opts.out_dir;
    config.threads = opts.threads;
    if (!opts.tiers.empty()) {
        std::vector<TierSpec> kept;
        for (const auto& name : opts.tiers) {
            const TierName wanted = tier_name_from_string(name);
            auto it = std::find_if(config.tiers.begin(), config.tiers.end(),
                                   [&](const TierSpec& t) { return t.name == wanted; });
            if (it == config.tiers.end()) {
                throw ConfigError("tier '" + name + "' is not in the config");
            }
            kept.push_back(*it);
        }
        config.tiers = std::move(kept);
    }
    config.validate();
    return config;
}

void add_common(CLI::App* cmd, CommonOptions& opts, bool with_tiers) {
    cmd->add_option("--config", opts.config_path, "Experiment config (JSON); built-in defaults when omitted")
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", opts.seeds, "Master seed (repeatable); overrides the config seed list");
    cmd->add_option("--out", opts.out_dir, "Output directory")->capture_default_str();
    cmd->add_option("--threads", opts.threads, "Worker threads (0 = all cores)")->capture_default_str();
    if (with_tiers) {
        cmd->add_option("--tier", opts.tiers, "Restrict to these tiers (repeatable)");
    }
}

int cmd_generate(const CommonOptions& opts) {
    const auto config = resolve_config(opts);
    const auto fingerprint = config_fingerprint(config);
    for (auto seed : config.seeds) {
        const auto dir = config.output_dir / fingerprint / ("seed-" + std::to_string(seed));
        const auto dataset = generate_dataset(config, seed);
        write_dataset_files(dataset, dir, fingerprint, seed);
        std::cout << dir.string() << "\n";
    }
    return 0;
}

int cmd_simulate(const CommonOptions& opts, const std::string& input) {
    const auto config = resolve_config(opts);
    const fs::path out(opts.out_dir);
    auto records = read_policy_table(input);
    const auto coeffs = loss_coefficients(config.generation);
    const auto seed = config.seeds.front();
    const auto outcomes = simulate_losses(records, coeffs, seed, config.threads);
    apply_losses(records, outcomes);
    export_policy_table(records, out / "policies_full.csv", Visibility::full);
    write_claims_jsonl(outcomes, out / "claims.jsonl");
    std::string oracle = "PolicyID,Prediction\n";
    for (const auto& p : oracle_predict(records, coeffs)) {
        oracle += p.policy_id + "," + csv::format_shortest(p.expected_loss) + "\n";
    }
    csv::write_file(out / "oracle_predictions.csv", oracle);
    std::cout << out.string() << "\n";
    return 0;
}

int cmd_channels(const CommonOptions& opts, const std::string& input) {
    const auto config = resolve_config(opts);
    const fs::path out(opts.out_dir);
    Dataset dataset;
    dataset.records = read_policy_table(input);
    dataset.coeffs = loss_coefficients(config.generation);
    const auto channels = compute_channels(dataset, config, config.seeds.front());
    write_prompt_manifest(channels.prompts, out / "prompts.jsonl");
    for (const auto& [name, outputs] : channels.by_tier) {
        write_channel_csv(outputs, out / "channels" / (std::string(to_string(name)) + ".csv"));
    }
    std::cout << out.string() << "\n";
    return 0;
}

int cmd_run(const CommonOptions& opts) {
    const auto config = resolve_config(opts);
    const auto result = run_experiment(config);
    for (const auto& seed : result.seeds) {
        if (seed.error) {
            std::cerr << "seed " << seed.seed << " failed at " << seed.failed_stage << ": " << *seed.error << "\n";
        }
    }
    const bool any_ok =
        std::any_of(result.seeds.begin(), result.seeds.end(), [](const SeedReport& r) { return !r.error; });
    if (!any_ok) {
        return 1;
    }
    std::cout << format_summary_table(result.summary) << "\nwritten to " << result.directory.string() << "\n";
    return 0;
}

int cmd_score(const std::string& predictions, const std::string& answers, const std::string& tie_policy) {
    MetricOptions options;
    options.tie_policy = tie_policy_from_string(tie_policy);
    const auto result = score_submission(predictions, answers, options);
    for (const auto& w : result.warnings) {
        std::cerr << "warning: " << w << "\n";
    }
    std::cout << to_json(result).dump(2) << "\n";
    return 0;
}

int cmd_report(const std::string& input, bool as_json) {
    std::vector<SeedReport> reports;
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(input)) {
        if (entry.is_regular_file() && entry.path().filename() == "report.json") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        throw ValidationError("no report.json files under " + input);
    }
    for (const auto& f : files) {
        std::ifstream in(f);
        try {
            reports.push_back(seed_report_from_json(nlohmann::json::parse(in)));
        } catch (const nlohmann::json::parse_error& e) {
            throw ValidationError(f.string() + ": " + e.what());
        }
    }
    const auto summary = summarize_seeds(reports);
    if (as_json) {
        std::cout << to_json(summary).dump(2) << "\n";
    } else {
        std::cout << format_summary_table(summary);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Synthetic property-insurance benchmark: datasets, roof channels, tier comparison, scoring"};
    app.require_subcommand(1);

    CommonOptions generate_opts;
    auto* generate = app.add_subcommand("generate", "Generate policy datasets (train/test/answers) and a manifest");
    add_common(generate, generate_opts, false);

    CommonOptions simulate_opts;
    std::string simulate_input;
    auto* simulate = app.add_subcommand("simulate", "Simulate next-year losses for a full policy table");
    add_common(simulate, simulate_opts, false);
    simulate->add_option("--in", simulate_input, "Full policy table (needs RoofHealth)")
        ->required()
        ->check(CLI::ExistingFile);

    CommonOptions channels_opts;
    std::string channels_input;
    auto* channels = app.add_subcommand("channels", "Write the prompt manifest and roof channel outputs");
    add_common(channels, channels_opts, true);
    channels->add_option("--in", channels_input, "Full policy table (needs RoofHealth)")
        ->required()
        ->check(CLI::ExistingFile);

    CommonOptions run_opts;
    auto* run = app.add_subcommand("run", "Run the full tier comparison");
    add_common(run, run_opts, true);

    std::string predictions;
    std::string answers;
    std::string tie_policy = "index";
    auto* score = app.add_subcommand("score", "Score a predictions CSV against an answers CSV");
    score->add_option("--predictions", predictions, "CSV with PolicyID,Prediction")->required()->check(CLI::ExistingFile);
    score->add_option("--answers", answers, "CSV with PolicyID,NextYearLoss")->required()->check(CLI::ExistingFile);
    score->add_option("--tie-policy", tie_policy, "index | average")->capture_default_str();

    std::string report_input;
    bool report_json = false;
    auto* report = app.add_subcommand("report", "Aggregate per-seed reports found under a directory");
    report->add_option("--in", report_input, "Directory holding seed-*/report.json")
        ->required()
        ->check(CLI::ExistingDirectory);
    report->add_flag("--json", report_json, "Print JSON instead of a table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*generate) {
            return cmd_generate(generate_opts);
        }
        if (*simulate) {
            return cmd_simulate(simulate_opts, simulate_input);
        }
        if (*channels) {
            return cmd_channels(channels_opts, channels_input);
        }
        if (*run) {
            return cmd_run(run_opts);
        }
        if (*score) {
            return cmd_score(predictions, answers, tie_policy);
        }
        if (*report) {
            return cmd_report(report_input, report_json);
        }
    } catch (const roofsim::Error& e) {
        std::cerr << "roofsim: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "roofsim: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
