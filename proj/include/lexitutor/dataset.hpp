#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lexitutor/dialogue.hpp"
#include "lexitutor/orchestrator.hpp"
#include "lexitutor/rng.hpp"
#include "lexitutor/templates.hpp"
#include "lexitutor/util.hpp"

namespace lexitutor {

// ---------------------------------------------------------------------------
// SFT split
// ---------------------------------------------------------------------------

struct split_spec {
    int test_size = 0;           // per-language test count; or
    double test_fraction = -1;   // per-language fraction when >= 0 (overrides size)
    std::uint64_t seed = 0;
};

struct sft_dataset {
    std::vector<tutor_dialogue> train;
    std::vector<tutor_dialogue> test;
};

// Splits ok-status dialogue records into disjoint per-language train/test
// sets. Dialogues seeded from the same dictionary entry always land in the
// same split (leakage guard), so a test target may be overshot by at most one
// entry group. Deterministic under the split seed; invariant to input order.
inline sft_dataset build_sft(const std::vector<generation_record>& records,
                             const split_spec& split) {
    std::vector<tutor_dialogue> dialogues;
    for (const auto& rec : records) {
        if (rec.status != gen_status::ok) continue;
        if (auto d = rec.dialogue()) dialogues.push_back(std::move(*d));
    }
    std::sort(dialogues.begin(), dialogues.end(),
              [](const tutor_dialogue& a, const tutor_dialogue& b) {
                  return a.dialogue_id < b.dialogue_id;
              });

    // language -> entry_id -> dialogues
    std::map<std::string, std::map<std::string, std::vector<tutor_dialogue>>> groups;
    for (auto& d : dialogues) groups[d.language][d.entry_id].push_back(std::move(d));

    sft_dataset out;
    for (auto& [language, by_entry] : groups) {
        std::size_t available = 0;
        for (const auto& [entry, ds] : by_entry) available += ds.size();

        std::size_t target;
        if (split.test_fraction >= 0.0) {
            if (split.test_fraction > 1.0)
                throw config_error("build_sft: test_fraction must be in [0, 1]");
            target = static_cast<std::size_t>(
                std::ceil(split.test_fraction * static_cast<double>(available)));
        } else {
            if (split.test_size < 0) throw config_error("build_sft: negative test_size");
            target = static_cast<std::size_t>(split.test_size);
        }
        if (target > available)
            throw data_error("build_sft: requested test size " + std::to_string(target) +
                             " exceeds the " + std::to_string(available) +
                             " dialogues available for language '" + language + "'");

        std::vector<std::string> entry_ids;
        entry_ids.reserve(by_entry.size());
        for (const auto& [entry, ds] : by_entry) entry_ids.push_back(entry);
        // canonical order (map iteration) then seeded Fisher-Yates
        split_mix64 rng(mix_seed(split.seed, fnv1a(language)));
        for (std::size_t i = entry_ids.size(); i > 1; --i)
            std::swap(entry_ids[i - 1], entry_ids[rng.bounded(i)]);

        std::size_t in_test = 0;
        for (const auto& id : entry_ids) {
            auto& ds = by_entry[id];
            const bool to_test = in_test < target;
            if (to_test) in_test += ds.size();
            auto& dest = to_test ? out.test : out.train;
            for (auto& d : ds) dest.push_back(std::move(d));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// DPO pairing
// ---------------------------------------------------------------------------

struct preference_pair {
    std::string pair_id;
    std::string language;
    std::string prompt;  // the learner query
    std::string chosen;
    std::string rejected;
    pair_quality_combo combo = pair_quality_combo::correct_query_correct_response;
    std::optional<negative_query_type> negative_type;
    std::string entry_id;
    std::string chosen_backend;
    std::string rejected_backend;
};

struct dpo_build_result {
    std::vector<preference_pair> pairs;
    std::vector<std::string> unmatched;  // request_ids with no ok twin
    struct quarantine_entry {
        std::string pair_id;
        std::string reason;
    };
    std::vector<quarantine_entry> quarantined;
};

// Joins chosen and rejected records on their shared pair lineage. Unmatched
// records are reported, never dropped silently; a pair whose chosen and
// rejected texts are identical is quarantined.
inline dpo_build_result build_dpo(const std::vector<generation_record>& chosen_records,
                                  const std::vector<generation_record>& rejected_records) {
    dpo_build_result out;
    std::map<std::string, const generation_record*> rejected_by_pair;
    for (const auto& rec : rejected_records) {
        if (rec.request.pair_id.empty())
            throw data_error("build_dpo: record '" + rec.request.request_id + "' has no pair lineage");
        rejected_by_pair[rec.request.pair_id] = &rec;
    }

    std::set<std::string> consumed;
    for (const auto& chosen : chosen_records) {
        if (chosen.request.pair_id.empty())
            throw data_error("build_dpo: record '" + chosen.request.request_id + "' has no pair lineage");
        auto it = rejected_by_pair.find(chosen.request.pair_id);
        const generation_record* rejected = it == rejected_by_pair.end() ? nullptr : it->second;
        if (rejected) consumed.insert(chosen.request.pair_id);

        if (!rejected) {
            out.unmatched.push_back(chosen.request.request_id);
            continue;
        }
        const auto chosen_text = chosen.response_text();
        const auto rejected_text = rejected->response_text();
        if (!chosen_text || !rejected_text) {
            if (!chosen_text) out.unmatched.push_back(chosen.request.request_id);
            if (!rejected_text) out.unmatched.push_back(rejected->request.request_id);
            continue;
        }
        if (*chosen_text == *rejected_text) {
            out.quarantined.push_back({chosen.request.pair_id, "chosen text identical to rejected"});
            continue;
        }
        preference_pair p;
        p.pair_id = chosen.request.pair_id;
        p.language = chosen.request.language;
        p.prompt = chosen.request.query_text;
        p.chosen = *chosen_text;
        p.rejected = *rejected_text;
        p.combo = chosen.request.combo;
        p.negative_type = chosen.request.negative_type;
        p.entry_id = chosen.request.entry_id;
        p.chosen_backend = chosen.backend;
        p.rejected_backend = rejected->backend;
        out.pairs.push_back(std::move(p));
    }
    for (const auto& [pair_id, rec] : rejected_by_pair)
        if (!consumed.count(pair_id)) out.unmatched.push_back(rec->request.request_id);
    return out;
}

// ---------------------------------------------------------------------------
// interchange emission
// ---------------------------------------------------------------------------

// SFT chat schema: {"messages": [{"role": "user"|"assistant", "content"}...]}
// with learner -> user and tutor -> assistant, plus provenance meta.
inline nlohmann::json sft_chat_json(const tutor_dialogue& d) {
    nlohmann::json messages = nlohmann::json::array();
    if (!d.system_preamble.empty())
        messages.push_back({{"role", "system"}, {"content", d.system_preamble}});
    for (const auto& t : d.turns)
        messages.push_back(
            {{"role", t.role == "learner" ? "user" : "assistant"}, {"content", t.content}});
    return nlohmann::json{{"messages", messages},
                          {"meta",
                           {{"dialogue_id", d.dialogue_id},
                            {"language", d.language},
                            {"kind", to_string(d.kind)},
                            {"entry_id", d.entry_id}}}};
}

inline tutor_dialogue sft_chat_from_json(const nlohmann::json& j) {
    tutor_dialogue d;
    const auto& meta = j.at("meta");
    d.dialogue_id = meta.at("dialogue_id").get<std::string>();
    d.language = meta.at("language").get<std::string>();
    d.kind = parse_dialogue_kind(meta.at("kind").get<std::string>());
    d.entry_id = meta.at("entry_id").get<std::string>();
    for (const auto& m : j.at("messages")) {
        const std::string role = m.at("role").get<std::string>();
        const std::string content = m.at("content").get<std::string>();
        if (role == "system") {
            d.system_preamble = content;
        } else {
            d.turns.push_back({role == "user" ? "learner" : "tutor", content});
        }
    }
    return d;
}

// DPO schema: {"prompt", "chosen", "rejected", "meta"}.
inline nlohmann::json dpo_json(const preference_pair& p) {
    nlohmann::json meta{{"pair_id", p.pair_id},
                        {"language", p.language},
                        {"combo", to_string(p.combo)},
                        {"entry_id", p.entry_id},
                        {"chosen_backend", p.chosen_backend},
                        {"rejected_backend", p.rejected_backend}};
    if (p.negative_type) meta["negative_type"] = to_string(*p.negative_type);
    return nlohmann::json{
        {"prompt", p.prompt}, {"chosen", p.chosen}, {"rejected", p.rejected}, {"meta", meta}};
}

inline preference_pair dpo_from_json(const nlohmann::json& j) {
    preference_pair p;
    p.prompt = j.at("prompt").get<std::string>();
    p.chosen = j.at("chosen").get<std::string>();
    p.rejected = j.at("rejected").get<std::string>();
    const auto& meta = j.at("meta");
    p.pair_id = meta.at("pair_id").get<std::string>();
    p.language = meta.at("language").get<std::string>();
    p.combo = parse_pair_quality_combo(meta.at("combo").get<std::string>());
    if (meta.contains("negative_type"))
        p.negative_type = parse_negative_query_type(meta.at("negative_type").get<std::string>());
    p.entry_id = meta.value("entry_id", "");
    p.chosen_backend = meta.value("chosen_backend", "");
    p.rejected_backend = meta.value("rejected_backend", "");
    return p;
}

namespace detail {

template <typename T, typename ToJson>
void emit_jsonl(const std::vector<T>& items, const std::filesystem::path& path, ToJson to) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot write " + path.string());
    for (const auto& item : items) out << to(item).dump() << "\n";
    if (!out) throw io_error("write failed for " + path.string());
}

template <typename FromJson>
auto read_jsonl(const std::filesystem::path& path, FromJson from)
    -> std::vector<decltype(from(nlohmann::json{}))> {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot read " + path.string());
    std::vector<decltype(from(nlohmann::json{}))> items;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim_view(line).empty()) continue;
        try {
            items.push_back(from(nlohmann::json::parse(line)));
        } catch (const std::exception& e) {
            throw data_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return items;
}

}  // namespace detail

inline void emit_sft(const std::vector<tutor_dialogue>& dialogues,
                     const std::filesystem::path& path) {
    detail::emit_jsonl(dialogues, path, sft_chat_json);
}

inline std::vector<tutor_dialogue> read_sft(const std::filesystem::path& path) {
    return detail::read_jsonl(path, sft_chat_from_json);
}

inline void emit_dpo(const std::vector<preference_pair>& pairs,
                     const std::filesystem::path& path) {
    detail::emit_jsonl(pairs, path, dpo_json);
}

inline std::vector<preference_pair> read_dpo(const std::filesystem::path& path) {
    return detail::read_jsonl(path, dpo_from_json);
}

// Per-language emission: writes <stem>.<lang>.jsonl next to `path`.
template <typename T>
std::vector<std::filesystem::path> emit_by_language(
    const std::vector<T>& items, const std::filesystem::path& path,
    void (*emit)(const std::vector<T>&, const std::filesystem::path&)) {
    std::map<std::string, std::vector<T>> by_lang;
    for (const auto& item : items) by_lang[item.language].push_back(item);
    std::vector<std::filesystem::path> written;
    for (const auto& [lang, group] : by_lang) {
        auto p = path;
        p.replace_extension("." + lang + ".jsonl");
        emit(group, p);
        written.push_back(p);
    }
    return written;
}

}  // namespace lexitutor
