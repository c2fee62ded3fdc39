#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "roofsim/error.hpp"
#include "roofsim/experiment.hpp"

namespace py = pybind11;
using namespace roofsim;

namespace {

// Configs cross the boundary as JSON text; the strict parser does the validation.
ExperimentConfig config_from_text(const std::optional<std::string>& text) {
    if (!text) {
        return ExperimentConfig::defaults();
    }
    try {
        return experiment_config_from_json(nlohmann::json::parse(*text));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
}

std::vector<double> as_doubles(const std::vector<OraclePrediction>& p) {
    std::vector<double> out;
    out.reserve(p.size());
    for (const auto& v : p) {
        out.push_back(v.expected_loss);
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_roofsim, m) {
    m.doc() = "Synthetic property-insurance benchmark core";

    auto base = py::register_exception<Error>(m, "RoofsimError");
    py::register_exception<ParameterError>(m, "ParameterError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<UsageError>(m, "UsageError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<IntegrityError>(m, "IntegrityError", base.ptr());
    py::register_exception<UndefinedMetricError>(m, "UndefinedMetricError", base.ptr());
    py::register_exception<CalibrationError>(m, "CalibrationError", base.ptr());

    m.attr("PRNG_ID") = std::string(kPrngId);

    py::enum_<RoofHealth>(m, "RoofHealth")
        .value("Good", RoofHealth::Good)
        .value("Fair", RoofHealth::Fair)
        .value("Bad", RoofHealth::Bad);
    py::enum_<WallType>(m, "WallType").value("Wood", WallType::Wood).value("Brick", WallType::Brick);

    py::class_<PolicyRecord>(m, "PolicyRecord")
        .def(py::init<>())
        .def_readwrite("policy_id", &PolicyRecord::policy_id)
        .def_readwrite("house_value", &PolicyRecord::house_value)
        .def_readwrite("house_age", &PolicyRecord::house_age)
        .def_readwrite("wall_type", &PolicyRecord::wall_type)
        .def_readwrite("area_risk", &PolicyRecord::area_risk)
        .def_readwrite("credit_score", &PolicyRecord::credit_score)
        .def_readwrite("latent_score", &PolicyRecord::latent_score)
        .def_readwrite("latent_noise", &PolicyRecord::latent_noise)
        .def_readwrite("roof_health", &PolicyRecord::roof_health)
        .def_readwrite("next_year_loss", &PolicyRecord::next_year_loss)
        .def("__repr__", [](const PolicyRecord& r) { return "<PolicyRecord " + r.policy_id + ">"; });

    py::class_<RoofCutpoints>(m, "RoofCutpoints")
        .def_readonly("fair_cut", &RoofCutpoints::fair_cut)
        .def_readonly("bad_cut", &RoofCutpoints::bad_cut);

    py::class_<ClaimOutcome>(m, "ClaimOutcome")
        .def_readonly("policy_id", &ClaimOutcome::policy_id)
        .def_readonly("lambda_", &ClaimOutcome::lambda)
        .def_readonly("claim_count", &ClaimOutcome::claim_count)
        .def_readonly("mu", &ClaimOutcome::mu)
        .def_readonly("claim_losses", &ClaimOutcome::claim_losses)
        .def_readonly("total_loss", &ClaimOutcome::total_loss);

    py::class_<GiniResult>(m, "GiniResult")
        .def_readonly("raw", &GiniResult::raw)
        .def_readonly("perfect_raw", &GiniResult::perfect_raw)
        .def_readonly("normalized", &GiniResult::normalized)
        .def_readonly("n", &GiniResult::n)
        .def_property_readonly("tie_policy", [](const GiniResult& g) { return std::string(to_string(g.tie_policy)); });

    py::class_<CalibrationResult>(m, "CalibrationResult")
        .def_readonly("accuracy", &CalibrationResult::accuracy)
        .def_readonly("achieved_correlation", &CalibrationResult::achieved_correlation)
        .def_readonly("iterations", &CalibrationResult::iterations);

    m.def("default_config_json", [] { return to_json(ExperimentConfig::defaults()).dump(); });
    m.def("config_fingerprint", [](const std::optional<std::string>& text) {
        return config_fingerprint(config_from_text(text));
    }, py::arg("config_json") = py::none());

    m.def(
        "generate_policies",
        [](std::uint64_t seed, const std::optional<std::string>& config_json, std::size_t threads) {
            auto generation = config_from_text(config_json).generation;
            generation.master_seed = seed;
            py::gil_scoped_release release;
            return generate_policies(generation, threads);
        },
        py::arg("seed") = 0, py::arg("config_json") = py::none(), py::arg("threads") = 0);

    m.def(
        "assign_roof_health",
        [](std::vector<PolicyRecord> records, double fair_percentile, double bad_percentile) {
            const auto cuts = assign_roof_health(records, Thresholds{fair_percentile, bad_percentile});
            return py::make_tuple(records, cuts);
        },
        py::arg("records"), py::arg("fair_percentile") = 55.0, py::arg("bad_percentile") = 80.0);

    m.def(
        "simulate_losses",
        [](const std::vector<PolicyRecord>& records, std::uint64_t seed, const std::optional<std::string>& config_json,
           std::size_t threads) {
            const auto coeffs = loss_coefficients(config_from_text(config_json).generation);
            py::gil_scoped_release release;
            return simulate_losses(records, coeffs, seed, threads);
        },
        py::arg("records"), py::arg("seed") = 0, py::arg("config_json") = py::none(), py::arg("threads") = 0);

    m.def(
        "oracle_predict",
        [](const std::vector<PolicyRecord>& records, const std::optional<std::string>& config_json) {
            return as_doubles(oracle_predict(records, loss_coefficients(config_from_text(config_json).generation)));
        },
        py::arg("records"), py::arg("config_json") = py::none());

    m.def(
        "raw_gini",
        [](const std::vector<double>& y, const std::vector<double>& y_hat, const std::string& tie_policy) {
            return raw_gini(y, y_hat, tie_policy_from_string(tie_policy));
        },
        py::arg("y"), py::arg("y_hat"), py::arg("tie_policy") = "index");
    m.def(
        "normalized_gini",
        [](const std::vector<double>& y, const std::vector<double>& y_hat, const std::string& tie_policy) {
            return normalized_gini(y, y_hat, tie_policy_from_string(tie_policy));
        },
        py::arg("y"), py::arg("y_hat"), py::arg("tie_policy") = "index");
    m.def(
        "ordinal_correlation",
        [](const std::vector<int>& a, const std::vector<int>& b, const std::string& kind) {
            std::vector<RoofHealth> la;
            std::vector<RoofHealth> lb;
            for (int v : a) {
                la.push_back(roof_health_from_ordinal(v));
            }
            for (int v : b) {
                lb.push_back(roof_health_from_ordinal(v));
            }
            return ordinal_correlation(la, lb, correlation_kind_from_string(kind));
        },
        py::arg("a"), py::arg("b"), py::arg("kind") = "pearson");

    m.def(
        "calibrate_labeler",
        [](double target, const std::string& mode, const std::array<double, 3>& proportions, std::uint64_t seed,
           std::size_t batch_size) {
            const auto confusion = confusion_mode_from_string(mode);
            py::gil_scoped_release release;
            return calibrate_labeler(target, confusion, proportions, seed, batch_size);
        },
        py::arg("target_correlation"), py::arg("mode") = "uniform",
        py::arg("class_proportions") = std::array<double, 3>{0.55, 0.25, 0.20}, py::arg("seed") = 0,
        py::arg("batch_size") = 100000);

    m.def(
        "run_experiment",
        [](const std::optional<std::string>& config_json, const std::optional<std::vector<std::uint64_t>>& seeds,
           const std::optional<std::string>& output_dir, bool write_files, std::size_t threads) {
            auto config = config_from_text(config_json);
            if (seeds) {
                config.seeds = *seeds;
            }
            if (output_dir) {
                config.output_dir = *output_dir;
            }
            config.threads = threads;
            config.validate();
            EvaluationReport report;
            {
                py::gil_scoped_release release;
                report = run_experiment(config, write_files);
            }
            nlohmann::ordered_json j;
            j["fingerprint"] = report.fingerprint;
            j["directory"] = write_files ? report.directory.string() : std::string();
            j["seeds"] = nlohmann::ordered_json::array();
            for (const auto& s : report.seeds) {
                j["seeds"].push_back(to_json(s));
            }
            j["summary"] = to_json(report.summary);
            return j.dump();
        },
        py::arg("config_json") = py::none(), py::arg("seeds") = py::none(), py::arg("output_dir") = py::none(),
        py::arg("write_files") = true, py::arg("threads") = 0);

    m.def(
        "score_submission",
        [](const std::filesystem::path& predictions, const std::filesystem::path& answers,
           const std::string& tie_policy) {
            MetricOptions options;
            options.tie_policy = tie_policy_from_string(tie_policy);
            return to_json(score_submission(predictions, answers, options)).dump();
        },
        py::arg("predictions"), py::arg("answers"), py::arg("tie_policy") = "index");
}
