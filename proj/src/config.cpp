#include "roofsim/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <type_traits>

#include "roofsim/error.hpp"

namespace roofsim {

using ojson = nlohmann::ordered_json;

std::string_view to_string(SplitRule rule) noexcept {
    return rule == SplitRule::first_n ? "first_n" : "seeded_shuffle";
}

SplitRule split_rule_from_string(std::string_view text) {
    if (text == "first_n") {
        return SplitRule::first_n;
    }
    if (text == "seeded_shuffle") {
        return SplitRule::seeded_shuffle;
    }
    throw ConfigError("unknown split rule '" + std::string(text) + "'");
}

std::vector<TierSpec> ExperimentConfig::default_tiers() {
    std::vector<TierSpec> tiers;
    for (auto name : kAllTiers) {
        TierSpec t;
        t.name = name;
        if (name == TierName::cluster_labels) {
            t.embedding = {32, 1.5, 1.0};
        }
        tiers.push_back(t);
    }
    return tiers;
}

ExperimentConfig ExperimentConfig::defaults() {
    ExperimentConfig c;
    c.tiers = default_tiers();
    return c;
}

void ExperimentConfig::validate() const {
    try {
        generation.validate();
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
    if (split.n_train + split.n_test != generation.n_policies) {
        throw ConfigError("split.n_train + split.n_test must equal generation.n_policies");
    }
    if (split.n_train == 0 || split.n_test == 0) {
        throw ConfigError("train and test splits must be nonempty");
    }
    if (tiers.empty()) {
        throw ConfigError("at least one tier is required");
    }
    std::set<TierName> names;
    for (const auto& t : tiers) {
        if (!names.insert(t.name).second) {
            throw ConfigError("duplicate tier '" + std::string(to_string(t.name)) + "'");
        }
        if (t.embedding.dim < 2 || !(t.embedding.noise_sigma > 0.0) || !(t.embedding.class_separation >= 0.0)) {
            throw ConfigError("tier " + std::string(to_string(t.name)) + ": invalid embedding parameters");
        }
        if (t.cluster_k < 2) {
            throw ConfigError("cluster_k must be at least 2");
        }
        if (!(t.target_correlation > 0.0 && t.target_correlation <= 1.0)) {
            throw ConfigError("target_correlation must lie in (0, 1]");
        }
        if (t.accuracy && !(*t.accuracy >= 1.0 / 3.0 && *t.accuracy <= 1.0)) {
            throw ConfigError("accuracy must lie in [1/3, 1]");
        }
    }
    try {
        forest.validate(5);
        descriptors.validate();
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
    if (seeds.empty()) {
        throw ConfigError("at least one seed is required");
    }
    if (calibration_batch < 100) {
        throw ConfigError("calibration_batch must be at least 100");
    }
}

namespace {

ojson tier_to_json(const TierSpec& t) {
    ojson j;
    j["name"] = to_string(t.name);
    switch (t.name) {
        case TierName::cluster_labels:
            j["encoding"] = to_string(t.encoding);
            j["cluster_k"] = t.cluster_k;
            [[fallthrough]];
        case TierName::embedding_features:
            j["embedding"] = {{"dim", t.embedding.dim},
                              {"class_separation", t.embedding.class_separation},
                              {"noise_sigma", t.embedding.noise_sigma}};
            break;
        case TierName::noisy_label:
            j["encoding"] = to_string(t.encoding);
            j["target_correlation"] = t.target_correlation;
            j["confusion_mode"] = to_string(t.confusion_mode);
            j["accuracy"] = t.accuracy ? ojson(*t.accuracy) : ojson(nullptr);
            break;
        case TierName::true_label:
            j["encoding"] = to_string(t.encoding);
            break;
        default:
            break;
    }
    return j;
}

ojson slots_to_json(const DescriptorTable::Slots& s) {
    return {{"surface", s.surface}, {"edge", s.edge}, {"extra", s.extra}};
}

ojson canonical_json(const ExperimentConfig& c) {
    const auto& g = c.generation;
    ojson j;
    auto& gen = j["generation"];
    gen["n_policies"] = g.n_policies;
    gen["house_value"] = {{"mu_log", g.value_params.mu_log}, {"sigma_log", g.value_params.sigma_log}};
    gen["house_age"] = {{"scale", g.age_scale}, {"beta_a", g.age_beta_params.a}, {"beta_b", g.age_beta_params.b}};
    gen["wall_type"] = {{"labels", g.wall_probs.labels}, {"probs", g.wall_probs.probs}};
    gen["area_risk"] = {{"beta_a", g.risk_beta_params.a}, {"beta_b", g.risk_beta_params.b}};
    auto bounds = ojson::array();
    for (auto [lo, hi] : g.fico_params.bucket_bounds) {
        bounds.push_back({lo, hi});
    }
    gen["credit_score"] = {{"bucket_bounds", bounds}, {"bucket_probs", g.fico_params.bucket_probs}};
    gen["latent_score"] = {{"age_coeff", g.score_coeffs.age_coeff},
                           {"risk_coeff", g.score_coeffs.risk_coeff},
                           {"credit_coeff", g.score_coeffs.credit_coeff},
                           {"credit_denominator", g.score_coeffs.credit_denominator},
                           {"noise_sigma", g.score_coeffs.noise_sigma}};
    gen["thresholds"] = {{"fair_percentile", g.thresholds.fair_percentile},
                         {"bad_percentile", g.thresholds.bad_percentile}};
    const auto& f = g.frequency_coeffs;
    gen["frequency"] = {{"intercept", f.intercept}, {"log_value_coeff", f.log_value_coeff},
                        {"value_ref", f.value_ref}, {"age_coeff", f.age_coeff},
                        {"risk_coeff", f.risk_coeff}, {"alpha_rh", f.alpha_rh},
                        {"nb_r", f.nb_r}};
    const auto& s = g.severity_coeffs;
    gen["severity"] = {{"intercept", s.intercept}, {"wood_coeff", s.wood_coeff}, {"risk_coeff", s.risk_coeff},
                       {"beta_rh", s.beta_rh},     {"gamma_k", s.gamma_k}};

    j["split"] = {{"n_train", c.split.n_train}, {"n_test", c.split.n_test}, {"rule", to_string(c.split.rule)}};
    auto& tiers = j["tiers"] = ojson::array();
    for (const auto& t : c.tiers) {
        tiers.push_back(tier_to_json(t));
    }
    j["forest"] = {{"n_trees", c.forest.n_trees},
                   {"max_depth", c.forest.max_depth ? ojson(*c.forest.max_depth) : ojson(nullptr)},
                   {"min_leaf", c.forest.min_leaf},
                   {"mtry", c.forest.mtry ? ojson(*c.forest.mtry) : ojson(nullptr)},
                   {"bootstrap", c.forest.bootstrap},
                   {"log_target", c.forest.log_target}};
    j["metrics"] = {{"tie_policy", to_string(c.metrics.tie_policy)},
                    {"correlation", to_string(c.metrics.correlation)}};
    j["descriptors"] = {{"Good", slots_to_json(c.descriptors.by_health[0])},
                        {"Fair", slots_to_json(c.descriptors.by_health[1])},
                        {"Bad", slots_to_json(c.descriptors.by_health[2])}};
    j["calibration_batch"] = c.calibration_batch;
    j["seeds"] = c.seeds;
    return j;
}

template <class T>
struct is_std_array : std::false_type {};
template <class T, std::size_t N>
struct is_std_array<std::array<T, N>> : std::true_type {};

// Walks one JSON object, remembering which keys were read so leftovers can be
// reported as unknown.
class Obj {
public:
    Obj(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) {
            throw ConfigError(path_ + " must be an object");
        }
    }
    ~Obj() noexcept(false) {
        if (std::uncaught_exceptions() == 0) {
            for (const auto& [key, _] : j_.items()) {
                if (!seen_.contains(key)) {
                    throw ConfigError("unknown key " + path_ + "." + key);
                }
            }
        }
    }
    Obj(const Obj&) = delete;
    Obj& operator=(const Obj&) = delete;

    const nlohmann::json* find(const std::string& key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    template <class T>
    void get(const std::string& key, T& out) {
        if (const auto* v = find(key)) {
            if constexpr (is_std_array<T>::value) {
                if (!v->is_array() || v->size() != std::tuple_size_v<T>) {
                    throw ConfigError(path_ + "." + key + " must have exactly " +
                                      std::to_string(std::tuple_size_v<T>) + " entries");
                }
            }
            try {
                out = v->get<T>();
            } catch (const nlohmann::json::exception&) {
                throw ConfigError(path_ + "." + key + " has the wrong type");
            }
        }
    }

    template <class T>
    void get_optional(const std::string& key, std::optional<T>& out) {
        if (const auto* v = find(key)) {
            if (v->is_null()) {
                out.reset();
            } else {
                T value{};
                get(key, value);
                out = value;
            }
        }
    }

    template <class Fn>
    void object(const std::string& key, Fn&& fn) {
        if (const auto* v = find(key)) {
            Obj child(*v, path_ + "." + key);
            fn(child);
        }
    }

    template <class Enum, class Parse>
    void enumeration(const std::string& key, Enum& out, Parse&& parse) {
        std::string text;
        if (find(key)) {
            get(key, text);
            out = parse(text);
        }
    }

    const std::string& path() const { return path_; }

private:
    const nlohmann::json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void read_slots(Obj& o, DescriptorTable::Slots& s) {
    o.get("surface", s.surface);
    o.get("edge", s.edge);
    o.get("extra", s.extra);
}

}  // namespace

nlohmann::ordered_json to_json(const ExperimentConfig& config) {
    auto j = canonical_json(config);
    j["output_dir"] = config.output_dir.string();
    j["threads"] = config.threads;
    return j;
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
    ExperimentConfig c = ExperimentConfig::defaults();
    {
        Obj root(j, "config");
        root.object("generation", [&](Obj& o) {
            auto& g = c.generation;
            o.get("n_policies", g.n_policies);
            o.object("house_value", [&](Obj& v) {
                v.get("mu_log", g.value_params.mu_log);
                v.get("sigma_log", g.value_params.sigma_log);
            });
            o.object("house_age", [&](Obj& v) {
                v.get("scale", g.age_scale);
                v.get("beta_a", g.age_beta_params.a);
                v.get("beta_b", g.age_beta_params.b);
            });
            o.object("wall_type", [&](Obj& v) {
                v.get("labels", g.wall_probs.labels);
                v.get("probs", g.wall_probs.probs);
            });
            o.object("area_risk", [&](Obj& v) {
                v.get("beta_a", g.risk_beta_params.a);
                v.get("beta_b", g.risk_beta_params.b);
            });
            o.object("credit_score", [&](Obj& v) {
                v.get("bucket_bounds", g.fico_params.bucket_bounds);
                v.get("bucket_probs", g.fico_params.bucket_probs);
            });
            o.object("latent_score", [&](Obj& v) {
                v.get("age_coeff", g.score_coeffs.age_coeff);
                v.get("risk_coeff", g.score_coeffs.risk_coeff);
                v.get("credit_coeff", g.score_coeffs.credit_coeff);
                v.get("credit_denominator", g.score_coeffs.credit_denominator);
                v.get("noise_sigma", g.score_coeffs.noise_sigma);
            });
            o.object("thresholds", [&](Obj& v) {
                v.get("fair_percentile", g.thresholds.fair_percentile);
                v.get("bad_percentile", g.thresholds.bad_percentile);
            });
            o.object("frequency", [&](Obj& v) {
                auto& f = g.frequency_coeffs;
                v.get("intercept", f.intercept);
                v.get("log_value_coeff", f.log_value_coeff);
                v.get("value_ref", f.value_ref);
                v.get("age_coeff", f.age_coeff);
                v.get("risk_coeff", f.risk_coeff);
                v.get("alpha_rh", f.alpha_rh);
                v.get("nb_r", f.nb_r);
            });
            o.object("severity", [&](Obj& v) {
                auto& s = g.severity_coeffs;
                v.get("intercept", s.intercept);
                v.get("wood_coeff", s.wood_coeff);
                v.get("risk_coeff", s.risk_coeff);
                v.get("beta_rh", s.beta_rh);
                v.get("gamma_k", s.gamma_k);
            });
        });
        root.object("split", [&](Obj& o) {
            o.get("n_train", c.split.n_train);
            o.get("n_test", c.split.n_test);
            o.enumeration("rule", c.split.rule, split_rule_from_string);
        });
        if (const auto* tiers = root.find("tiers")) {
            if (!tiers->is_array()) {
                throw ConfigError("config.tiers must be an array");
            }
            c.tiers.clear();
            for (std::size_t i = 0; i < tiers->size(); ++i) {
                Obj o((*tiers)[i], "config.tiers[" + std::to_string(i) + "]");
                std::string name;
                o.get("name", name);
                TierSpec t;
                t.name = tier_name_from_string(name);
                // Start from the shipped default for this tier.
                for (const auto& d : ExperimentConfig::default_tiers()) {
                    if (d.name == t.name) {
                        t = d;
                    }
                }
                o.enumeration("encoding", t.encoding, encoding_from_string);
                o.get("cluster_k", t.cluster_k);
                o.object("embedding", [&](Obj& e) {
                    e.get("dim", t.embedding.dim);
                    e.get("class_separation", t.embedding.class_separation);
                    e.get("noise_sigma", t.embedding.noise_sigma);
                });
                o.get("target_correlation", t.target_correlation);
                o.enumeration("confusion_mode", t.confusion_mode, confusion_mode_from_string);
                o.get_optional("accuracy", t.accuracy);
                c.tiers.push_back(t);
            }
        }
        root.object("forest", [&](Obj& o) {
            o.get("n_trees", c.forest.n_trees);
            o.get_optional("max_depth", c.forest.max_depth);
            o.get("min_leaf", c.forest.min_leaf);
            o.get_optional("mtry", c.forest.mtry);
            o.get("bootstrap", c.forest.bootstrap);
            o.get("log_target", c.forest.log_target);
        });
        root.object("metrics", [&](Obj& o) {
            o.enumeration("tie_policy", c.metrics.tie_policy, tie_policy_from_string);
            o.enumeration("correlation", c.metrics.correlation, correlation_kind_from_string);
        });
        root.object("descriptors", [&](Obj& o) {
            o.object("Good", [&](Obj& s) { read_slots(s, c.descriptors.by_health[0]); });
            o.object("Fair", [&](Obj& s) { read_slots(s, c.descriptors.by_health[1]); });
            o.object("Bad", [&](Obj& s) { read_slots(s, c.descriptors.by_health[2]); });
        });
        root.get("calibration_batch", c.calibration_batch);
        root.get("seeds", c.seeds);
        std::string out_dir = c.output_dir.string();
        root.get("output_dir", out_dir);
        c.output_dir = out_dir;
        root.get("threads", c.threads);
    }
    c.validate();
    return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return experiment_config_from_json(j);
}

std::string config_fingerprint(const ExperimentConfig& config) {
    char buffer[17];
    std::snprintf(buffer, sizeof buffer, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canonical_json(config).dump())));
    return buffer;
}

}  // namespace roofsim
