#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lexitutor/dict.hpp"
#include "lexitutor/rng.hpp"
#include "lexitutor/util.hpp"

namespace lexitutor {

// ---------------------------------------------------------------------------
// kinds
// ---------------------------------------------------------------------------

enum class dialogue_kind {
    direct_qa,
    quiz_multiple_choice,
    fill_in_the_blank,
    role_play,
    error_correction,
    sentence_building,
    translation_practice,
    spelling_pronunciation,
    cultural_note,
    grammar_explanation,
};

inline constexpr std::array<dialogue_kind, 10> all_dialogue_kinds{
    dialogue_kind::direct_qa,          dialogue_kind::quiz_multiple_choice,
    dialogue_kind::fill_in_the_blank,  dialogue_kind::role_play,
    dialogue_kind::error_correction,   dialogue_kind::sentence_building,
    dialogue_kind::translation_practice, dialogue_kind::spelling_pronunciation,
    dialogue_kind::cultural_note,      dialogue_kind::grammar_explanation,
};

inline std::string_view to_string(dialogue_kind k) {
    switch (k) {
        case dialogue_kind::direct_qa: return "direct_qa";
        case dialogue_kind::quiz_multiple_choice: return "quiz_multiple_choice";
        case dialogue_kind::fill_in_the_blank: return "fill_in_the_blank";
        case dialogue_kind::role_play: return "role_play";
        case dialogue_kind::error_correction: return "error_correction";
        case dialogue_kind::sentence_building: return "sentence_building";
        case dialogue_kind::translation_practice: return "translation_practice";
        case dialogue_kind::spelling_pronunciation: return "spelling_pronunciation";
        case dialogue_kind::cultural_note: return "cultural_note";
        case dialogue_kind::grammar_explanation: return "grammar_explanation";
    }
    return "unknown";
}

inline dialogue_kind parse_dialogue_kind(std::string_view name) {
    for (dialogue_kind k : all_dialogue_kinds)
        if (to_string(k) == name) return k;
    throw config_error("unknown dialogue kind: " + std::string(name));
}

enum class negative_query_type {
    misspelled_typo,
    vague_ambiguous,
    irrelevant_mixed_context,
    factually_wrong_premise,
    out_of_scope_nonsensical,
};

inline constexpr std::array<negative_query_type, 5> all_negative_query_types{
    negative_query_type::misspelled_typo,
    negative_query_type::vague_ambiguous,
    negative_query_type::irrelevant_mixed_context,
    negative_query_type::factually_wrong_premise,
    negative_query_type::out_of_scope_nonsensical,
};

inline std::string_view to_string(negative_query_type t) {
    switch (t) {
        case negative_query_type::misspelled_typo: return "misspelled_typo";
        case negative_query_type::vague_ambiguous: return "vague_ambiguous";
        case negative_query_type::irrelevant_mixed_context: return "irrelevant_mixed_context";
        case negative_query_type::factually_wrong_premise: return "factually_wrong_premise";
        case negative_query_type::out_of_scope_nonsensical: return "out_of_scope_nonsensical";
    }
    return "unknown";
}

inline negative_query_type parse_negative_query_type(std::string_view name) {
    for (negative_query_type t : all_negative_query_types)
        if (to_string(t) == name) return t;
    throw config_error("unknown negative query type: " + std::string(name));
}

enum class pair_quality_combo {
    correct_query_correct_response,
    incorrect_query_correct_response,
    correct_query_incorrect_response,
};

inline constexpr std::array<pair_quality_combo, 3> all_pair_quality_combos{
    pair_quality_combo::correct_query_correct_response,
    pair_quality_combo::incorrect_query_correct_response,
    pair_quality_combo::correct_query_incorrect_response,
};

inline std::string_view to_string(pair_quality_combo c) {
    switch (c) {
        case pair_quality_combo::correct_query_correct_response:
            return "correct_query_correct_response";
        case pair_quality_combo::incorrect_query_correct_response:
            return "incorrect_query_correct_response";
        case pair_quality_combo::correct_query_incorrect_response:
            return "correct_query_incorrect_response";
    }
    return "unknown";
}

inline pair_quality_combo parse_pair_quality_combo(std::string_view name) {
    for (pair_quality_combo c : all_pair_quality_combos)
        if (to_string(c) == name) return c;
    throw config_error("unknown pair quality combo: " + std::string(name));
}

// ---------------------------------------------------------------------------
// requests
// ---------------------------------------------------------------------------

enum class request_class { sft_dialogue, dpo_response, judge_verdict };

inline std::string_view to_string(request_class c) {
    switch (c) {
        case request_class::sft_dialogue: return "sft_dialogue";
        case request_class::dpo_response: return "dpo_response";
        case request_class::judge_verdict: return "judge_verdict";
    }
    return "unknown";
}

inline request_class parse_request_class(std::string_view name) {
    if (name == "sft_dialogue") return request_class::sft_dialogue;
    if (name == "dpo_response") return request_class::dpo_response;
    if (name == "judge_verdict") return request_class::judge_verdict;
    throw data_error("unknown request class: " + std::string(name));
}

struct generation_request {
    std::string request_id;
    std::string entry_id;
    request_class cls = request_class::sft_dialogue;
    dialogue_kind kind = dialogue_kind::direct_qa;       // sft_dialogue
    std::optional<negative_query_type> negative_type;    // dpo_response
    pair_quality_combo combo = pair_quality_combo::correct_query_correct_response;
    std::string prompt_text;  // fully instantiated, no residual slot markers
    int min_learner_turns = 3;
    std::string target_role;  // "chosen-generator" | "rejected-generator" | "judge"
    std::uint64_t seed = 0;
    std::string language;
    std::string pair_id;     // shared lineage between a dpo chosen/rejected pair
    std::string query_text;  // the learner query for dpo and judge requests
};

// ---------------------------------------------------------------------------
// template library
// ---------------------------------------------------------------------------

// Prompt templates with named slots in square brackets. The builtin set is
// authoritative for tests; a directory of editable UTF-8 files with the same
// names overrides individual templates.
class template_library {
public:
    static const template_library& builtin() {
        static const template_library lib = make_builtin();
        return lib;
    }

    // Overrides builtin templates from <dir>/sft/<kind>.txt,
    // <dir>/dpo/query_<negative_type>.txt, <dir>/dpo/query_correct.txt,
    // <dir>/dpo/chosen.txt and <dir>/dpo/rejected.txt.
    static template_library load_dir(const std::filesystem::path& dir) {
        template_library lib = make_builtin();
        auto maybe_read = [](const std::filesystem::path& p) -> std::optional<std::string> {
            std::ifstream in(p, std::ios::binary);
            if (!in) return std::nullopt;
            std::string text((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
            while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
            return text;
        };
        for (dialogue_kind k : all_dialogue_kinds)
            if (auto t = maybe_read(dir / "sft" / (std::string(to_string(k)) + ".txt")))
                lib.sft_[static_cast<std::size_t>(k)] = *t;
        for (negative_query_type t : all_negative_query_types)
            if (auto s = maybe_read(dir / "dpo" / ("query_" + std::string(to_string(t)) + ".txt")))
                lib.neg_query_[static_cast<std::size_t>(t)] = *s;
        if (auto s = maybe_read(dir / "dpo" / "query_correct.txt")) lib.correct_query_ = *s;
        if (auto s = maybe_read(dir / "dpo" / "chosen.txt")) lib.chosen_ = *s;
        if (auto s = maybe_read(dir / "dpo" / "rejected.txt")) lib.rejected_ = *s;
        return lib;
    }

    const std::string& sft(dialogue_kind k) const {
        const auto& t = sft_[static_cast<std::size_t>(k)];
        if (t.empty())
            throw config_error("no template text for dialogue kind '" +
                               std::string(to_string(k)) + "'");
        return t;
    }

    const std::string& negative_query(negative_query_type t) const {
        return neg_query_[static_cast<std::size_t>(t)];
    }

    const std::string& correct_query() const { return correct_query_; }
    const std::string& chosen_instructions() const { return chosen_; }
    const std::string& rejected_instructions() const { return rejected_; }

private:
    static template_library make_builtin();

    std::array<std::string, 10> sft_{};
    std::array<std::string, 5> neg_query_{};
    std::string correct_query_;
    std::string chosen_;
    std::string rejected_;
};

namespace detail {

inline const std::string k_transcript_format_rules =
    "Write the conversation with at least [MIN_TURNS] learner turns and a tutor reply "
    "after each one, strictly alternating and starting with the learner.\n"
    "Format every turn on its own line, exactly as:\n"
    "[learner] <what the learner says>\n"
    "[tutor] <what the tutor says>\n"
    "Do not add any text before the first turn or after the last turn.";

inline const std::string k_seed_block =
    "Seed vocabulary: the [LANGUAGE] word \"[WORD]\", which means \"[MEANING]\" in English.";

}  // namespace detail

inline template_library template_library::make_builtin() {
    template_library lib;
    auto sft_text = [](std::string_view task) {
        return "You are writing training material for an AI language tutor. Simulate a "
               "tutoring session between a beginner learner of [LANGUAGE] (instruction "
               "medium: English) and an expert [LANGUAGE] tutor.\n" +
               detail::k_seed_block + "\nTask: " + std::string(task) + "\n" +
               detail::k_transcript_format_rules;
    };
    auto set = [&](dialogue_kind k, std::string text) {
        lib.sft_[static_cast<std::size_t>(k)] = std::move(text);
    };
    set(dialogue_kind::direct_qa,
        sft_text("The learner asks what \"[WORD]\" means and the tutor explains the meaning "
                 "simply, with a short usage note."));
    set(dialogue_kind::quiz_multiple_choice,
        sft_text("The tutor quizzes the learner on \"[WORD]\" with a multiple-choice question "
                 "(three options, one correct); the learner answers and the tutor confirms or "
                 "corrects, then asks a follow-up."));
    set(dialogue_kind::fill_in_the_blank,
        sft_text("The tutor gives a contextual [LANGUAGE] sentence with \"[WORD]\" blanked out; "
                 "the learner guesses the missing word and the tutor explains why "
                 "\"[WORD]\" fits."));
    set(dialogue_kind::role_play,
        sft_text("The learner and tutor role-play a short everyday scene (a greeting, a market, "
                 "or a classroom) in which \"[WORD]\" is used naturally; the tutor stays in "
                 "character and still teaches."));
    set(dialogue_kind::error_correction,
        sft_text("The learner uses \"[WORD]\" incorrectly or misunderstands it as meaning "
                 "something else; the tutor gently corrects the misunderstanding with hints "
                 "before giving the answer."));
    set(dialogue_kind::sentence_building,
        sft_text("The learner asks the tutor to build sentences with \"[WORD]\"; the tutor "
                 "constructs complete [LANGUAGE] sentences of increasing difficulty and "
                 "glosses each in English."));
    set(dialogue_kind::translation_practice,
        sft_text("The tutor runs forward and backward translation practice around \"[WORD]\": "
                 "[LANGUAGE] to English, then English to [LANGUAGE], checking the learner's "
                 "attempts."));
    set(dialogue_kind::spelling_pronunciation,
        sft_text("The learner practices spelling and pronouncing \"[WORD]\"; the tutor gives a "
                 "phonetic rendering, syllable breakdown, and corrects the learner's attempt."));
    set(dialogue_kind::cultural_note,
        sft_text("The tutor explains the cultural or contextual relevance of \"[WORD]\" (when "
                 "it is used, by whom, and any etiquette around it), answering the learner's "
                 "follow-up questions."));
    set(dialogue_kind::grammar_explanation,
        sft_text("The learner asks about a grammar rule involving \"[WORD]\" (for example how "
                 "it inflects or combines); the tutor gives a clear, simple explanation with "
                 "examples."));

    auto& nq = lib.neg_query_;
    nq[static_cast<std::size_t>(negative_query_type::misspelled_typo)] =
        "What does \"[MISSPELLED]\" mean in [LANGUAGE]? I saw it somewhere but I am not sure "
        "I spelled it right.";
    nq[static_cast<std::size_t>(negative_query_type::vague_ambiguous)] =
        "[WORD]... what about this?";
    nq[static_cast<std::size_t>(negative_query_type::irrelevant_mixed_context)] =
        "While you explain the [LANGUAGE] word \"[WORD]\", can you also fix my Python loop and "
        "tell me if it will rain tomorrow?";
    nq[static_cast<std::size_t>(negative_query_type::factually_wrong_premise)] =
        "Since \"[WORD]\" means \"[WRONG_MEANING]\" in [LANGUAGE], can I use it to describe a "
        "river?";
    nq[static_cast<std::size_t>(negative_query_type::out_of_scope_nonsensical)] =
        "What color is the [LANGUAGE] word \"[WORD]\"? Also, how would I use it as an insult?";

    lib.correct_query_ =
        "I am learning [LANGUAGE]. Could you explain the word \"[WORD]\" and show me how to "
        "use it?";

    lib.chosen_ =
        "You are an expert, encouraging [LANGUAGE] tutor. A learner sent the message below. "
        "Reply with an accurate, pedagogically complete answer: handle any problem in the "
        "query (typos, wrong assumptions, missing context, off-topic parts) gracefully, "
        "teach the word \"[WORD]\" (English meaning: \"[MEANING]\"), and keep an "
        "appropriate tutoring tone.\nLearner message:\n[QUERY]";

    lib.rejected_ =
        "Answer the message below about the [LANGUAGE] word \"[WORD]\" in one or two short "
        "sentences.\nMessage:\n[QUERY]";

    return lib;
}

// ---------------------------------------------------------------------------
// instantiation
// ---------------------------------------------------------------------------

namespace detail {

// Any leftover [ALL_CAPS] slot marker means a template and its fill set
// disagree; that is a configuration problem, not a data problem.
inline void check_no_residual_slots(std::string_view text, std::string_view what) {
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '[') continue;
        auto close = text.find(']', i);
        if (close == std::string_view::npos) break;
        bool slot_like = close > i + 1;
        for (std::size_t k = i + 1; k < close && slot_like; ++k) {
            const char c = text[k];
            slot_like = (c >= 'A' && c <= 'Z') || c == '_';
        }
        if (slot_like)
            throw config_error(std::string(what) + ": residual slot marker '" +
                               std::string(text.substr(i, close - i + 1)) + "'");
        i = close;
    }
}

inline std::string substitute(std::string text,
                              const std::map<std::string, std::string>& slots) {
    for (const auto& [name, value] : slots) text = replace_all(std::move(text), name, value);
    return text;
}

}  // namespace detail

// Deterministic single-word misspelling bounded to edit distance 1..3:
// adjacent swap, omission, duplication, or a (phonetic when possible)
// substitution, occasionally followed by one more single-character edit.
inline std::string misspell(std::string_view word, std::uint64_t seed) {
    auto cps = utf8_decode(word);
    if (cps.empty()) return std::string(word);
    split_mix64 rng(mix_seed(fnv1a(word), seed));
    const std::vector<char32_t> original = cps;

    auto phonetic_sub = [&](char32_t c) -> char32_t {
        static const std::pair<char32_t, char32_t> pairs[] = {
            {U'c', U'k'}, {U's', U'z'}, {U'f', U'v'}, {U'b', U'p'},
            {U'd', U't'}, {U'g', U'k'}, {U'l', U'r'}, {U'i', U'y'},
        };
        for (auto [a, b] : pairs) {
            if (c == a) return b;
            if (c == b) return a;
        }
        static const char32_t vowels[] = {U'a', U'e', U'i', U'o', U'u'};
        for (std::size_t vi = 0; vi < 5; ++vi)
            if (c == vowels[vi]) return vowels[(vi + 1 + rng.bounded(4)) % 5];
        return 0;
    };

    auto apply_one = [&](std::vector<char32_t>& w) {
        const auto n = w.size();
        switch (rng.bounded(4)) {
            case 0:  // swap adjacent
                if (n >= 2) {
                    const auto i = rng.bounded(n - 1);
                    std::swap(w[i], w[i + 1]);
                }
                break;
            case 1:  // omit
                if (n >= 2) w.erase(w.begin() + static_cast<long>(rng.bounded(n)));
                break;
            case 2: {  // substitute
                const auto i = rng.bounded(n);
                if (char32_t sub = phonetic_sub(w[i]); sub != 0) {
                    w[i] = sub;
                } else {
                    w.insert(w.begin() + static_cast<long>(i), w[i]);  // duplicate instead
                }
                break;
            }
            default:  // duplicate
                w.insert(w.begin() + static_cast<long>(rng.bounded(n)), w[rng.bounded(n)]);
                break;
        }
    };

    for (int attempt = 0; attempt < 16; ++attempt) {
        std::vector<char32_t> w = original;
        apply_one(w);
        if (rng.bounded(2) == 0 && !w.empty()) {
            // optional second cost-1 edit, never a swap (keeps distance <= 3)
            const auto i = rng.bounded(w.size());
            if (rng.bounded(2) == 0 && w.size() >= 2)
                w.erase(w.begin() + static_cast<long>(i));
            else
                w.insert(w.begin() + static_cast<long>(i), w[i]);
        }
        if (!w.empty() && w != original) return utf8_encode(w);
    }
    // tiny words can survive every random edit above; force a duplication
    std::vector<char32_t> w = original;
    w.push_back(w.back());
    return utf8_encode(w);
}

// Supplies plausible-but-wrong glosses for the wrong-premise query: glosses
// drawn from other entries of the same language, with a small builtin decoy
// list when the corpus has nothing usable.
class wrong_gloss_pool {
public:
    wrong_gloss_pool() = default;

    explicit wrong_gloss_pool(const std::vector<dict_entry>& corpus, std::string_view language) {
        for (const auto& e : corpus)
            if (e.language == language && !e.translations.empty())
                glosses_.push_back(e.translations.front());
    }

    std::string pick(std::string_view exclude, std::uint64_t seed) const {
        static const std::vector<std::string> decoys{"a small boat", "yesterday evening",
                                                     "to run quickly", "a clay pot"};
        split_mix64 rng(mix_seed(seed, fnv1a(exclude)));
        const auto& pool = glosses_.empty() ? decoys : glosses_;
        for (int attempt = 0; attempt < 8; ++attempt) {
            const auto& g = pool[rng.bounded(pool.size())];
            if (g != exclude) return g;
        }
        return decoys[rng.bounded(decoys.size())] == exclude ? decoys.front() : decoys.back();
    }

private:
    std::vector<std::string> glosses_;
};

// Instantiates one multi-turn generation request. Pure in (entry, kind, seed):
// the same inputs always produce byte-identical prompts.
inline generation_request instantiate_sft(const dict_entry& entry, dialogue_kind kind,
                                          std::uint64_t seed,
                                          const template_library& lib = template_library::builtin(),
                                          int min_learner_turns = 3) {
    if (entry.headword.empty() || entry.translations.empty())
        throw data_error("instantiate_sft: entry '" + entry.entry_id + "' is not valid");
    generation_request req;
    req.cls = request_class::sft_dialogue;
    req.kind = kind;
    req.entry_id = entry.entry_id;
    req.language = entry.language;
    req.min_learner_turns = min_learner_turns;
    req.target_role = "chosen-generator";
    req.seed = seed;
    req.request_id = "sft-" + std::string(to_string(kind)) + "-" + entry.entry_id + "-s" +
                     std::to_string(seed);
    req.prompt_text = detail::substitute(
        lib.sft(kind), {{"[WORD]", entry.headword},
                        {"[LANGUAGE]", language_name(entry.language)},
                        {"[MEANING]", entry.translations.front()},
                        {"[MIN_TURNS]", std::to_string(min_learner_turns)}});
    detail::check_no_residual_slots(req.prompt_text, "sft template " + std::string(to_string(kind)));
    return req;
}

// Instantiates a preference pair: two requests sharing one learner query, one
// routed to the chosen-generator and one to the rejected-generator. A
// negative query type is required exactly when the combo perturbs the query.
inline std::pair<generation_request, generation_request> instantiate_dpo(
    const dict_entry& entry, std::optional<negative_query_type> neg, pair_quality_combo combo,
    std::uint64_t seed, const template_library& lib = template_library::builtin(),
    const wrong_gloss_pool& pool = {}) {
    if (entry.headword.empty() || entry.translations.empty())
        throw data_error("instantiate_dpo: entry '" + entry.entry_id + "' is not valid");
    const bool wants_perturbation = combo == pair_quality_combo::incorrect_query_correct_response;
    if (wants_perturbation && !neg)
        throw std::invalid_argument(
            "instantiate_dpo: incorrect_query_correct_response requires a negative query type");
    if (!wants_perturbation && neg)
        throw std::invalid_argument("instantiate_dpo: a correct query excludes perturbation (combo " +
                                    std::string(to_string(combo)) + ")");

    std::map<std::string, std::string> slots{
        {"[WORD]", entry.headword},
        {"[LANGUAGE]", language_name(entry.language)},
        {"[MEANING]", entry.translations.front()},
    };
    if (neg == negative_query_type::misspelled_typo)
        slots["[MISSPELLED]"] = misspell(entry.headword, seed);
    if (neg == negative_query_type::factually_wrong_premise)
        slots["[WRONG_MEANING]"] = pool.pick(entry.translations.front(), seed);

    const std::string& query_template = neg ? lib.negative_query(*neg) : lib.correct_query();
    const std::string query = detail::substitute(query_template, slots);
    detail::check_no_residual_slots(query, "dpo query template");
    slots["[QUERY]"] = query;

    const std::string base_id = "dpo-" + std::string(neg ? to_string(*neg) : "correct") + "-" +
                                std::string(to_string(combo)) + "-" + entry.entry_id + "-s" +
                                std::to_string(seed);

    auto make = [&](std::string_view role, const std::string& tmpl) {
        generation_request req;
        req.cls = request_class::dpo_response;
        req.entry_id = entry.entry_id;
        req.language = entry.language;
        req.negative_type = neg;
        req.combo = combo;
        req.seed = seed;
        req.target_role = std::string(role);
        req.pair_id = base_id;
        req.request_id = base_id + "#" + (role == "chosen-generator" ? "chosen" : "rejected");
        req.query_text = query;
        req.prompt_text = detail::substitute(tmpl, slots);
        detail::check_no_residual_slots(req.prompt_text, "dpo instruction template");
        return req;
    };
    return {make("chosen-generator", lib.chosen_instructions()),
            make("rejected-generator", lib.rejected_instructions())};
}

// ---------------------------------------------------------------------------
// batch planning
// ---------------------------------------------------------------------------

struct batch_quotas {
    std::map<dialogue_kind, int> sft;  // requests per kind
    // preference PAIRS per cell; a null negative type is valid only for the
    // two correct-query combos
    std::map<std::pair<std::optional<negative_query_type>, pair_quality_combo>, int> dpo;

    void validate() const {
        for (const auto& [k, q] : sft)
            if (q < 0) throw config_error("negative sft quota for kind " + std::string(to_string(k)));
        for (const auto& [cell, q] : dpo)
            if (q < 0) throw config_error("negative dpo quota");
    }

    // every compatible cell, quota n each
    static batch_quotas full_coverage(int sft_per_kind, int dpo_per_cell) {
        batch_quotas q;
        for (dialogue_kind k : all_dialogue_kinds) q.sft[k] = sft_per_kind;
        for (negative_query_type t : all_negative_query_types)
            q.dpo[{t, pair_quality_combo::incorrect_query_correct_response}] = dpo_per_cell;
        q.dpo[{std::nullopt, pair_quality_combo::correct_query_correct_response}] = dpo_per_cell;
        q.dpo[{std::nullopt, pair_quality_combo::correct_query_incorrect_response}] = dpo_per_cell;
        return q;
    }
};

// Plans a deterministic batch over one corpus: entries are drawn uniformly
// (with replacement) per kind after a canonical entry_id sort, so the plan is
// invariant to input ordering. DPO cells contribute a chosen and a rejected
// request per planned pair.
inline std::vector<generation_request> plan_batch(
    std::vector<dict_entry> corpus, const batch_quotas& quotas, std::uint64_t seed,
    const template_library& lib = template_library::builtin()) {
    quotas.validate();
    long total_quota = 0;
    for (const auto& [k, q] : quotas.sft) total_quota += q;
    for (const auto& [cell, q] : quotas.dpo) total_quota += q;
    if (total_quota == 0) return {};
    if (corpus.empty()) throw data_error("plan_batch: positive quota but the corpus is empty");
    std::sort(corpus.begin(), corpus.end(),
              [](const dict_entry& a, const dict_entry& b) { return a.entry_id < b.entry_id; });

    std::vector<generation_request> plan;
    plan.reserve(static_cast<std::size_t>(total_quota) * 2);
    std::uint64_t request_index = 0;
    auto next_seed = [&] { return mix_seed(seed, request_index++); };

    split_mix64 rng(mix_seed(seed, 0x5f7a));
    for (dialogue_kind k : all_dialogue_kinds) {
        auto it = quotas.sft.find(k);
        if (it == quotas.sft.end()) continue;
        for (int i = 0; i < it->second; ++i) {
            const auto& entry = corpus[rng.bounded(corpus.size())];
            plan.push_back(instantiate_sft(entry, k, next_seed(), lib));
        }
    }
    for (const auto& [cell, quota] : quotas.dpo) {
        const auto& [neg, combo] = cell;
        for (int i = 0; i < quota; ++i) {
            const auto& entry = corpus[rng.bounded(corpus.size())];
            wrong_gloss_pool pool(corpus, entry.language);
            auto [chosen, rejected] = instantiate_dpo(entry, neg, combo, next_seed(), lib, pool);
            plan.push_back(std::move(chosen));
            plan.push_back(std::move(rejected));
        }
    }
    return plan;
}

// Plans `total` SFT requests with the kind itself sampled uniformly.
inline std::vector<generation_request> plan_uniform_sft(
    std::vector<dict_entry> corpus, int total, std::uint64_t seed,
    const template_library& lib = template_library::builtin()) {
    if (total < 0) throw config_error("plan_uniform_sft: negative total");
    if (total == 0) return {};
    if (corpus.empty()) throw data_error("plan_uniform_sft: positive quota but the corpus is empty");
    std::sort(corpus.begin(), corpus.end(),
              [](const dict_entry& a, const dict_entry& b) { return a.entry_id < b.entry_id; });
    std::vector<generation_request> plan;
    plan.reserve(static_cast<std::size_t>(total));
    split_mix64 rng(mix_seed(seed, 0x91e2));
    for (int i = 0; i < total; ++i) {
        const auto kind = all_dialogue_kinds[rng.bounded(all_dialogue_kinds.size())];
        const auto& entry = corpus[rng.bounded(corpus.size())];
        plan.push_back(instantiate_sft(entry, kind, mix_seed(seed, static_cast<std::uint64_t>(i)), lib));
    }
    return plan;
}

}  // namespace lexitutor
