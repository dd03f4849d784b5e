#pragma once

#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "lexitutor/metrics/ratings.hpp"
#include "lexitutor/orchestrator.hpp"
#include "lexitutor/util.hpp"

namespace lexitutor {

// One candidate answer to be scored against the rubric.
struct judge_item {
    std::string item_id;
    std::string question;
    std::string candidate;
    std::string language;
    std::string kind;  // dialogue kind name, for per-kind aggregation
};

// Four rationale/score pairs parsed from the judge's strict-JSON reply.
// Field order matches the rubric's criterion order.
struct judge_verdict {
    std::array<std::string, 4> rationales;
    std::array<int, 4> scores{};  // each on the 1/3/5/7 scale

    int score(criterion c) const { return scores[static_cast<std::size_t>(c)]; }
};

// The verdict JSON field names, exactly as the rubric requests them.
inline constexpr std::array<std::pair<std::string_view, std::string_view>, 4> verdict_fields{{
    {"instruction_following_rationale", "instruction_alignment_score"},
    {"pedagogical_completeness_rationale", "pedagogical_completeness_score"},
    {"linguistic_cultural_accuracy_rationale", "linguistic_cultural_accuracy_score"},
    {"coherence_and_naturalness_rationale", "coherence_and_naturalness_score"},
}};

inline void to_json(nlohmann::json& j, const judge_verdict& v) {
    j = nlohmann::json::object();
    for (std::size_t i = 0; i < 4; ++i) {
        j[std::string(verdict_fields[i].first)] = v.rationales[i];
        j[std::string(verdict_fields[i].second)] = v.scores[i];
    }
}

// ---------------------------------------------------------------------------
// rubric
// ---------------------------------------------------------------------------

// The scoring rubric sent to the judge model. Shipped as an editable data
// file; this builtin copy keeps the harness self-contained and byte-stable.
inline const std::string& judge_rubric_text() {
    static const std::string text = R"RUBRIC(You are a skilled language tutoring evaluator tasked with judging the quality of a generated language teaching answer for a given query.

Instruction:
Score the answer generated by a system to a user's request on a Likert scale (1, 3, 5, 7) for four quality criteria.
Include a concise rationale for each score in less than 50 words (in English).

Rubric:
(1) Instruction Alignment
7: The response shows a perfect understanding of the user's intent. It follows all instructions, including task type (e.g., dialogue), formatting, and specific language constraints.
5: The response addresses the user's core question and follows most instructions, but may have minor slips in formatting or include slightly extraneous information.
3: The response only partially understands the user's intent. It might answer the question but fail to follow the requested format (e.g., providing a list when a dialogue was asked for) or omit a key constraint.
1: The response completely misses the user's intent, answers a different question, or fails to follow any of the structural instructions provided.

(2) Pedagogical Completeness
7: Provides a comprehensive learning "package": a clear explanation of the concept, multiple relevant examples, and a practice prompt or "scaffolding" that guides the learner to the next level.
5: Generally helpful for learning; provides an answer and an explanation, but the examples might be a bit generic or the scaffolding could be more structured.
3: Limited educational value. It might give the correct answer but offer a poor or overly brief explanation, leaving the learner without a clear understanding of the "why."
1: Pedagogically useless. Just gives the answer without any explanation or context, or provides misleading pedagogical advice that would confuse a student.

(3) Linguistic & Cultural Accuracy
7: The language is flawless and sounds like a native speaker. It includes relevant cultural nuances (e.g., proper Amharic honorifics or social context) that make the language feel real and usable.
5: Grammatically correct with very minor slips. It is culturally acceptable but might rely on slightly formal or "textbook" phrasing that isn't commonly used in daily life.
3: Contains several grammatical or spelling errors. It may use literal translations that are technically "correct" but socially awkward or culturally weird in the target language.
1: Pervasive linguistic errors that distort meaning. The response is culturally insensitive or uses "hallucinated" grammar that would teach the learner incorrect habits.

(4) Coherence & Naturalness
7: Perfectly organized with smooth transitions. The tone is encouraging, professional, and engaging. It reads like high-quality material from a professional language school.
5: Logical and easy to follow, though it may feel a bit mechanical. The tone is polite and professional, with minor gaps in the "flow" of conversation.
3: Noticeable issues in organization. The transitions between the explanation and the examples are clunky, or the tone feels inconsistent (e.g., shifting from overly formal to too casual).
1: Disjointed and difficult to follow. Ideas are disconnected, and the tone is either robotic, rude, or completely inappropriate for a tutoring environment.

Response Format (Strict JSON):
{
  "instruction_following_rationale": "...", "instruction_alignment_score": SCORE,
  "pedagogical_completeness_rationale": "...", "pedagogical_completeness_score": SCORE,
  "linguistic_cultural_accuracy_rationale": "...", "linguistic_cultural_accuracy_score": SCORE,
  "coherence_and_naturalness_rationale": "...", "coherence_and_naturalness_score": SCORE
}

Question: {question}
Candidate: {candidate}
)RUBRIC";
    return text;
}

inline std::string load_rubric(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot read rubric file " + path.string());
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// Substitutes {question} and {candidate} into the rubric. The rubric text
// itself is byte-stable across runs.
inline std::string build_judge_prompt(const judge_item& item,
                                      const std::string& rubric = judge_rubric_text()) {
    std::string prompt = replace_all(rubric, "{question}", item.question);
    prompt = replace_all(std::move(prompt), "{candidate}", item.candidate);
    return prompt;
}

// ---------------------------------------------------------------------------
// verdict parsing
// ---------------------------------------------------------------------------

struct verdict_error : data_error {
    verdict_error(std::string reason_code, const std::string& detail)
        : data_error("verdict: " + detail + " [" + reason_code + "]"),
          reason(std::move(reason_code)) {}
    std::string reason;
};

namespace detail {

// Finds the first balanced {...} object, respecting JSON string quoting, so
// prose or markdown fencing around the object is tolerated.
inline std::optional<std::string> extract_json_object(std::string_view raw) {
    for (auto start = raw.find('{'); start != std::string_view::npos;
         start = raw.find('{', start + 1)) {
        int depth = 0;
        bool in_string = false, escaped = false;
        for (std::size_t i = start; i < raw.size(); ++i) {
            const char c = raw[i];
            if (in_string) {
                if (escaped)
                    escaped = false;
                else if (c == '\\')
                    escaped = true;
                else if (c == '"')
                    in_string = false;
            } else if (c == '"') {
                in_string = true;
            } else if (c == '{') {
                ++depth;
            } else if (c == '}') {
                if (--depth == 0) return std::string(raw.substr(start, i - start + 1));
            }
        }
    }
    return std::nullopt;
}

inline int coerce_score(const nlohmann::json& v) {
    if (v.is_number_integer()) return v.get<int>();
    if (v.is_number_float()) {
        const double d = v.get<double>();
        const int i = static_cast<int>(d);
        if (static_cast<double>(i) == d) return i;
        throw verdict_error("off_scale", "non-integral score " + std::to_string(d));
    }
    if (v.is_string()) {
        const std::string s = trim(v.get<std::string>());
        try {
            std::size_t used = 0;
            const int i = std::stoi(s, &used);
            if (used == s.size()) return i;
        } catch (const std::exception&) {
        }
        throw verdict_error("bad_score_type", "score '" + s + "' is not numeric");
    }
    throw verdict_error("bad_score_type", "score has non-numeric JSON type");
}

inline int count_words(std::string_view s) {
    return static_cast<int>(split_tokens(s).size());
}

}  // namespace detail

// Extracts and validates a judge verdict from a raw model reply. All eight
// fields must be present, scores on the 1/3/5/7 scale, rationales non-empty.
// Over-length rationales (the rubric asks for < 50 words) are soft warnings.
inline judge_verdict parse_verdict(std::string_view raw,
                                   std::vector<std::string>* warnings = nullptr) {
    const auto object_text = detail::extract_json_object(raw);
    if (!object_text) throw verdict_error("no_json", "no JSON object found in reply");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(*object_text);
    } catch (const nlohmann::json::exception& e) {
        throw verdict_error("bad_json", e.what());
    }
    judge_verdict v;
    for (std::size_t i = 0; i < 4; ++i) {
        const auto [rationale_key, score_key] = verdict_fields[i];
        if (!j.contains(rationale_key) || !j.contains(score_key))
            throw verdict_error("missing_field",
                                "missing '" + std::string(!j.contains(rationale_key)
                                                              ? rationale_key
                                                              : score_key) + "'");
        if (!j.at(std::string(rationale_key)).is_string())
            throw verdict_error("bad_json", std::string(rationale_key) + " is not a string");
        v.rationales[i] = j.at(std::string(rationale_key)).get<std::string>();
        if (trim_view(v.rationales[i]).empty())
            throw verdict_error("empty_rationale", "empty '" + std::string(rationale_key) + "'");
        const int score = detail::coerce_score(j.at(std::string(score_key)));
        if (!on_rating_scale(score))
            throw verdict_error("off_scale", "off-scale score " + std::to_string(score) + " for '" +
                                                 std::string(score_key) + "'");
        v.scores[i] = score;
        if (warnings && detail::count_words(v.rationales[i]) >= 50)
            warnings->push_back("rationale '" + std::string(rationale_key) + "' is " +
                                std::to_string(detail::count_words(v.rationales[i])) +
                                " words (rubric asks for < 50)");
    }
    return v;
}

// ---------------------------------------------------------------------------
// batch judging
// ---------------------------------------------------------------------------

struct judge_outcome {
    std::string item_id;
    std::string language;
    std::string kind;
    std::optional<judge_verdict> verdict;
    std::string failure_reason;
    int attempts = 0;
};

// Runs items through the orchestrator (same retry/checkpoint semantics as
// generation). Malformed verdicts are retried up to the backend's policy and
// then reported as failures; every item yields exactly one outcome row.
inline std::vector<judge_outcome> judge_batch(const std::vector<judge_item>& items,
                                              text_backend& backend, const backend_spec& spec,
                                              const std::filesystem::path& checkpoint_path,
                                              const std::string& rubric = judge_rubric_text()) {
    std::vector<generation_request> requests;
    requests.reserve(items.size());
    for (const auto& item : items) {
        if (item.question.empty() || item.candidate.empty())
            throw data_error("judge item '" + item.item_id + "': question and candidate must be non-empty");
        generation_request req;
        req.cls = request_class::judge_verdict;
        req.request_id = "judge-" + item.item_id;
        req.entry_id = item.item_id;
        req.language = item.language;
        req.query_text = item.question;
        req.target_role = "judge";
        req.seed = fnv1a(item.item_id);
        req.prompt_text = build_judge_prompt(item, rubric);
        requests.push_back(std::move(req));
    }

    run_options options;
    options.validator = [](const generation_request&, const std::string& raw,
                           generation_record& rec) -> std::string {
        try {
            const judge_verdict v = parse_verdict(raw);
            rec.parsed = nlohmann::json(v);
            return {};
        } catch (const verdict_error& e) {
            return e.reason;
        }
    };
    const auto records = run_batch(requests, backend, spec, checkpoint_path, options);

    std::vector<judge_outcome> outcomes;
    outcomes.reserve(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
        judge_outcome out;
        out.item_id = items[i].item_id;
        out.language = items[i].language;
        out.kind = items[i].kind;
        out.attempts = records[i].attempts;
        if (records[i].status == gen_status::ok && records[i].parsed) {
            judge_verdict v;
            for (std::size_t k = 0; k < 4; ++k) {
                v.rationales[k] =
                    records[i].parsed->at(std::string(verdict_fields[k].first)).get<std::string>();
                v.scores[k] =
                    records[i].parsed->at(std::string(verdict_fields[k].second)).get<int>();
            }
            out.verdict = v;
        } else {
            out.failure_reason = records[i].failure_reason;
        }
        outcomes.push_back(std::move(out));
    }
    return outcomes;
}

// ---------------------------------------------------------------------------
// aggregation
// ---------------------------------------------------------------------------

enum class verdict_group_by { language, kind };

struct verdict_aggregation {
    criterion_table table;
    std::vector<std::string> warnings;  // groups excluded for having no verdicts
};

// Mean rating per criterion per group plus the percentage conversion. Groups
// with failures only are excluded with a warning rather than zero-filled.
inline verdict_aggregation aggregate_verdicts(const std::vector<judge_outcome>& outcomes,
                                              verdict_group_by group_by) {
    verdict_aggregation out;
    std::map<std::string, std::array<std::pair<long, int>, 4>> sums;  // group -> (sum, count)
    for (const auto& o : outcomes) {
        const std::string& group = group_by == verdict_group_by::language ? o.language : o.kind;
        auto& row = sums[group];
        if (!o.verdict) continue;
        for (std::size_t i = 0; i < 4; ++i) {
            row[i].first += o.verdict->scores[i];
            row[i].second += 1;
        }
    }
    for (const auto& [group, row] : sums) {
        if (row[0].second == 0) {
            out.warnings.push_back("group '" + group + "' has no successful verdicts; excluded");
            continue;
        }
        for (criterion c : all_criteria) {
            const auto& [sum, count] = row[static_cast<std::size_t>(c)];
            auto& cell = out.table.at(group, c);
            cell.count = count;
            cell.mean_rating = static_cast<double>(sum) / count;
            cell.percent = rating_to_percent(*cell.mean_rating);
        }
    }
    return out;
}

}  // namespace lexitutor
