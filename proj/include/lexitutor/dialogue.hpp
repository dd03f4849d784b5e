#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "lexitutor/templates.hpp"
#include "lexitutor/util.hpp"

namespace lexitutor {

struct dialogue_turn {
    std::string role;  // "learner" | "tutor"
    std::string content;

    friend bool operator==(const dialogue_turn&, const dialogue_turn&) = default;
};

// A validated multi-turn learner/tutor exchange, the SFT unit.
struct tutor_dialogue {
    std::string dialogue_id;
    std::string language;
    dialogue_kind kind = dialogue_kind::direct_qa;
    std::string entry_id;
    std::vector<dialogue_turn> turns;  // alternating, learner first
    std::string system_preamble;       // optional

    int learner_turns() const {
        int n = 0;
        for (const auto& t : turns) n += t.role == "learner";
        return n;
    }
};

inline void to_json(nlohmann::json& j, const dialogue_turn& t) {
    j = nlohmann::json{{"role", t.role}, {"content", t.content}};
}

inline void from_json(const nlohmann::json& j, dialogue_turn& t) {
    j.at("role").get_to(t.role);
    j.at("content").get_to(t.content);
}

inline void to_json(nlohmann::json& j, const tutor_dialogue& d) {
    j = nlohmann::json{{"dialogue_id", d.dialogue_id}, {"language", d.language},
                       {"kind", to_string(d.kind)},    {"entry_id", d.entry_id},
                       {"turns", d.turns}};
    if (!d.system_preamble.empty()) j["system_preamble"] = d.system_preamble;
}

inline void from_json(const nlohmann::json& j, tutor_dialogue& d) {
    j.at("dialogue_id").get_to(d.dialogue_id);
    j.at("language").get_to(d.language);
    d.kind = parse_dialogue_kind(j.at("kind").get<std::string>());
    j.at("entry_id").get_to(d.entry_id);
    j.at("turns").get_to(d.turns);
    d.system_preamble = j.value("system_preamble", "");
}

// Thrown by parse_dialogue; `reason` is a stable machine-readable code
// ("alternation", "min_turns", "empty_turn", "bad_role", "no_turns",
// "dangling_turn").
struct dialogue_error : data_error {
    dialogue_error(std::string reason_code, const std::string& detail)
        : data_error("dialogue: " + detail + " [" + reason_code + "]"),
          reason(std::move(reason_code)) {}
    std::string reason;
};

// Parses the delimited transcript format the generators are instructed to
// emit: one turn per "[learner] ..." / "[tutor] ..." line, continuation lines
// appended to the open turn. Enforces strict alternation starting with the
// learner, at least `min_learner_turns` learner turns, and non-empty content.
inline tutor_dialogue parse_dialogue(std::string_view raw, int min_learner_turns = 3) {
    tutor_dialogue d;
    bool saw_tag = false;
    for (const auto& line : split_lines(raw)) {
        std::string_view v = trim_view(line);
        std::string role;
        if (v.rfind("[learner]", 0) == 0) {
            role = "learner";
            v.remove_prefix(9);
        } else if (v.rfind("[tutor]", 0) == 0) {
            role = "tutor";
            v.remove_prefix(7);
        } else if (!v.empty() && v.front() == '[') {
            if (auto close = v.find(']'); close != std::string_view::npos && close > 1) {
                bool tag_like = true;
                for (std::size_t i = 1; i < close && tag_like; ++i)
                    tag_like = (v[i] >= 'a' && v[i] <= 'z') || v[i] == '_';
                if (tag_like)
                    throw dialogue_error("bad_role", "unknown role tag '" +
                                                         std::string(v.substr(0, close + 1)) + "'");
            }
        }
        if (role.empty()) {
            // continuation of the open turn; leading prose before any tag is
            // tolerated and ignored
            if (saw_tag && !v.empty()) {
                auto& turn = d.turns.back();
                if (!turn.content.empty()) turn.content += "\n";
                turn.content += std::string(v);
            }
            continue;
        }
        saw_tag = true;
        if (d.turns.empty() && role != "learner")
            throw dialogue_error("alternation", "transcript must start with a learner turn");
        if (!d.turns.empty()) {
            if (d.turns.back().role == role)
                throw dialogue_error("alternation", "two consecutive " + role + " turns");
            if (d.turns.back().content.empty())
                throw dialogue_error("empty_turn", "empty " + d.turns.back().role + " turn");
        }
        d.turns.push_back({role, trim(v)});
    }
    if (d.turns.empty()) throw dialogue_error("no_turns", "no role-tagged turns found");
    if (d.turns.back().content.empty())
        throw dialogue_error("empty_turn", "empty " + d.turns.back().role + " turn");
    // a full turn is a learner message plus the tutor's answer
    if (d.turns.back().role == "learner")
        throw dialogue_error("dangling_turn", "transcript ends on an unanswered learner turn");
    if (d.learner_turns() < min_learner_turns)
        throw dialogue_error("min_turns",
                             "only " + std::to_string(d.learner_turns()) + " learner turns, need " +
                                 std::to_string(min_learner_turns));
    return d;
}

// Inverse of parse_dialogue for well-formed dialogues; used by the mock
// backend and round-trip tests.
inline std::string format_transcript(const tutor_dialogue& d) {
    std::string out;
    for (const auto& t : d.turns) {
        out += "[" + t.role + "] " + t.content + "\n";
    }
    return out;
}

}  // namespace lexitutor
