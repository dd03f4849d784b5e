#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lexitutor/backend.hpp"
#include "lexitutor/dataset.hpp"
#include "lexitutor/metrics/chrf.hpp"
#include "lexitutor/metrics/kappa.hpp"
#include "lexitutor/util.hpp"

namespace lexitutor {

struct source_spec {
    std::filesystem::path path;
    std::string profile;  // lines | tsv | kv
    std::string language;
    std::string source_id;
};

// The single versioned configuration file driving every subcommand. Seeds are
// explicit (a missing seed is a config error, never a wall-clock default) and
// secrets never appear here: backends carry only the env var NAME of their
// token.
struct pipeline_config {
    int version = 1;
    std::vector<std::string> languages;
    std::vector<source_spec> sources;
    backend_spec chosen_backend;
    backend_spec rejected_backend;
    backend_spec judge_backend;
    std::map<std::string, int> sft_quotas;  // dialogue kind name -> requests per language
    int dpo_pairs_per_cell = 1;             // preference pairs per (negative type x combo) cell
    split_spec split;
    chrf_config chrf;
    kappa_weighting kappa = kappa_weighting::quadratic;
    double retention_fraction = 0.9;
    std::uint64_t seed = 0;
    std::optional<std::filesystem::path> template_dir;
};

inline pipeline_config parse_config(const nlohmann::json& j,
                                    const std::filesystem::path& base_dir) {
    pipeline_config cfg;
    cfg.version = j.value("version", 1);
    if (cfg.version != 1)
        throw config_error("unsupported config version " + std::to_string(cfg.version));
    if (!j.contains("seed"))
        throw config_error("config must set an explicit seed (wall-clock defaults are not allowed)");
    cfg.seed = j.at("seed").get<std::uint64_t>();

    if (j.contains("languages")) j.at("languages").get_to(cfg.languages);

    if (j.contains("sources")) {
        for (const auto& s : j.at("sources")) {
            source_spec src;
            src.path = base_dir / s.at("path").get<std::string>();
            src.profile = s.at("profile").get<std::string>();
            src.language = s.at("language").get<std::string>();
            src.source_id = s.value("source_id", src.path.stem().string());
            if (!std::filesystem::exists(src.path))
                throw config_error("source path does not exist: " + src.path.string());
            cfg.sources.push_back(std::move(src));
        }
    }

    auto load_backend = [&](const char* key, const char* fallback_name) {
        backend_spec spec;
        spec.name = fallback_name;
        if (j.contains("backends") && j.at("backends").contains(key)) {
            j.at("backends").at(key).get_to(spec);
            if (spec.name.empty()) spec.name = fallback_name;
            for (const auto& [k, v] : j.at("backends").at(key).items())
                if (k == "auth_token" || k == "api_key" || k == "token")
                    throw config_error(std::string("backend '") + key +
                                       "': secrets must come from the environment, not the config "
                                       "file (set auth_env instead)");
        }
        spec.validate();
        return spec;
    };
    cfg.chosen_backend = load_backend("chosen", "chosen-generator");
    cfg.rejected_backend = load_backend("rejected", "rejected-generator");
    cfg.judge_backend = load_backend("judge", "judge");

    if (j.contains("sft_quotas"))
        for (const auto& [kind, count] : j.at("sft_quotas").items()) {
            parse_dialogue_kind(kind);  // validates the name
            cfg.sft_quotas[kind] = count.get<int>();
        }
    cfg.dpo_pairs_per_cell = j.value("dpo_pairs_per_cell", 1);

    if (j.contains("split")) {
        const auto& s = j.at("split");
        cfg.split.test_size = s.value("test_size", 0);
        cfg.split.test_fraction = s.value("test_fraction", -1.0);
        cfg.split.seed = s.value("seed", cfg.seed);
    } else {
        cfg.split.seed = cfg.seed;
    }

    if (j.contains("chrf")) {
        const auto& c = j.at("chrf");
        cfg.chrf.char_order = c.value("char_order", 6);
        cfg.chrf.word_order = c.value("word_order", 2);
        cfg.chrf.beta = c.value("beta", 2.0);
        cfg.chrf.validate();
    }
    if (j.contains("kappa_weighting")) {
        const auto w = j.at("kappa_weighting").get<std::string>();
        if (w == "linear")
            cfg.kappa = kappa_weighting::linear;
        else if (w == "quadratic")
            cfg.kappa = kappa_weighting::quadratic;
        else
            throw config_error("kappa_weighting must be 'linear' or 'quadratic'");
    }
    cfg.retention_fraction = j.value("retention_fraction", 0.9);
    if (!(cfg.retention_fraction > 0.0 && cfg.retention_fraction <= 1.0))
        throw config_error("retention_fraction must be in (0, 1]");

    if (j.contains("template_dir")) {
        cfg.template_dir = base_dir / j.at("template_dir").get<std::string>();
        if (!std::filesystem::exists(*cfg.template_dir))
            throw config_error("template_dir does not exist: " + cfg.template_dir->string());
    }
    return cfg;
}

inline pipeline_config load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot read config file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw config_error("config " + path.string() + ": " + e.what());
    }
    return parse_config(j, path.parent_path());
}

}  // namespace lexitutor
