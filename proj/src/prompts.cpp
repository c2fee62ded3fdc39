#include <set>

#include <nlohmann/json.hpp>

#include "roofsim/csv.hpp"
#include "roofsim/error.hpp"
#include "roofsim/roof_channel.hpp"

namespace roofsim {

DescriptorTable DescriptorTable::defaults() {
    DescriptorTable table;
    table.by_health[0] = {
        {"even rows of intact shingles", "uniform shingle color with crisp tab lines"},
        {"well-sealed ridge lines", "straight clean eaves"},
        {"clean flashing around the chimney", "gutters free of debris"},
    };
    table.by_health[1] = {
        {"slightly faded shingles", "a few curling shingle tabs"},
        {"ridge line with mild wear", "slightly weathered eaves"},
        {"light moss along the gutters", "minor granule loss near the flashing"},
    };
    table.by_health[2] = {
        {"multiple missing shingles", "patched and cracked shingles"},
        {"damaged or sagging ridge", "broken and uneven eaves"},
        {"rusted flashing with exposed gaps", "debris piled in the roof valleys"},
    };
    return table;
}

void DescriptorTable::validate() const {
    std::set<std::string> seen;
    for (auto rh : kAllRoofHealth) {
        const auto& s = slots(rh);
        const std::string category(to_string(rh));
        if (s.surface.empty() || s.edge.empty() || s.extra.empty()) {
            throw ConfigError("descriptor table: empty descriptor list for " + category);
        }
        std::set<std::string> own;
        for (const auto* list : {&s.surface, &s.edge, &s.extra}) {
            for (const auto& phrase : *list) {
                if (phrase.empty()) {
                    throw ConfigError("descriptor table: empty phrase for " + category);
                }
                if (seen.contains(phrase)) {
                    throw ConfigError("descriptor table: phrase '" + phrase + "' shared across categories");
                }
                own.insert(phrase);
            }
        }
        seen.insert(own.begin(), own.end());
    }
}

std::string expand_prompt(std::string_view roof_style, std::string_view shingle_color, std::string_view surface,
                          std::string_view edge, std::string_view extra) {
    std::string text =
        "Realistic straight-down aerial photo of a detached house, full roof and surrounding lawn in view, ";
    text += roof_style;
    text += " roof with ";
    text += shingle_color;
    text += " shingles, ";
    text += surface;
    text += ", ";
    text += edge;
    text += ", ";
    text += extra;
    text += ".";
    return text;
}

std::vector<PromptSpec> generate_prompts(std::span<const PolicyRecord> records, const DescriptorTable& table,
                                         std::uint64_t seed) {
    table.validate();
    std::vector<PromptSpec> prompts;
    prompts.reserve(records.size());
    for (const auto& r : records) {
        if (!r.roof_health) {
            throw UsageError("generate_prompts: roof health not assigned for " + r.policy_id);
        }
        const auto& slots = table.slots(*r.roof_health);
        Rng rng(seed, "prompt:" + r.policy_id);
        PromptSpec p;
        p.policy_id = r.policy_id;
        p.roof_style = kRoofStyles[rng.below(kRoofStyles.size())];
        p.shingle_color = kShingleColors[rng.below(kShingleColors.size())];
        p.surface_descriptor = slots.surface[rng.below(slots.surface.size())];
        p.edge_descriptor = slots.edge[rng.below(slots.edge.size())];
        p.extra_descriptor = slots.extra[rng.below(slots.extra.size())];
        p.prompt_text = expand_prompt(p.roof_style, p.shingle_color, p.surface_descriptor, p.edge_descriptor,
                                      p.extra_descriptor);
        prompts.push_back(std::move(p));
    }
    return prompts;
}

std::string format_prompt_manifest(std::span<const PromptSpec> prompts) {
    std::string out;
    for (const auto& p : prompts) {
        nlohmann::ordered_json line;
        line["policy_id"] = p.policy_id;
        line["roof_style"] = p.roof_style;
        line["shingle_color"] = p.shingle_color;
        line["surface"] = p.surface_descriptor;
        line["edge"] = p.edge_descriptor;
        line["extra"] = p.extra_descriptor;
        line["prompt"] = p.prompt_text;
        out += line.dump();
        out += '\n';
    }
    return out;
}

void write_prompt_manifest(std::span<const PromptSpec> prompts, const std::filesystem::path& destination) {
    csv::write_file(destination, format_prompt_manifest(prompts));
}

std::optional<RoofHealth> roof_health_from_prompt(std::string_view prompt_text, const DescriptorTable& table) {
    auto any_in = [&](const std::vector<std::string>& phrases) {
        for (const auto& phrase : phrases) {
            if (prompt_text.find(phrase) != std::string_view::npos) {
                return true;
            }
        }
        return false;
    };
    std::optional<RoofHealth> match;
    for (auto rh : kAllRoofHealth) {
        const auto& s = table.slots(rh);
        if (any_in(s.surface) && any_in(s.edge) && any_in(s.extra)) {
            if (match) {
                return std::nullopt;
            }
            match = rh;
        }
    }
    return match;
}

}  // namespace roofsim
