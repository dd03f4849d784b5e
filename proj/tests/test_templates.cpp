#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "lexitutor/templates.hpp"
#include "test_helpers.hpp"

using namespace lexitutor;

namespace {
dict_entry entry_for(std::string head, std::string gloss, std::string lang = "amh",
                     std::string id = "e:1") {
    dict_entry e;
    e.entry_id = std::move(id);
    e.headword = std::move(head);
    e.language = std::move(lang);
    e.translations = {std::move(gloss)};
    e.source_id = "test";
    return e;
}
}  // namespace

TEST_CASE("enum inventories are exactly 10 / 5 / 3", "[templates]") {
    CHECK(all_dialogue_kinds.size() == 10);
    CHECK(all_negative_query_types.size() == 5);
    CHECK(all_pair_quality_combos.size() == 3);
    std::set<std::string_view> names;
    for (auto k : all_dialogue_kinds) names.insert(to_string(k));
    CHECK(names.size() == 10);
    for (auto k : all_dialogue_kinds) CHECK(parse_dialogue_kind(to_string(k)) == k);
    for (auto t : all_negative_query_types) CHECK(parse_negative_query_type(to_string(t)) == t);
    for (auto c : all_pair_quality_combos) CHECK(parse_pair_quality_combo(to_string(c)) == c);
}

TEST_CASE("instantiate_sft substitutes every slot", "[templates]") {
    const auto e = entry_for("selam", "peace");
    const auto req = instantiate_sft(e, dialogue_kind::fill_in_the_blank, 1);
    CHECK(contains(req.prompt_text, "selam"));
    CHECK(contains(req.prompt_text, "Amharic"));
    CHECK(contains(req.prompt_text, "peace"));
    CHECK_FALSE(contains(req.prompt_text, "[WORD]"));
    CHECK_FALSE(contains(req.prompt_text, "[WRONG_MEANING]"));
    CHECK_FALSE(contains(req.prompt_text, "[LANGUAGE]"));
    CHECK(req.min_learner_turns >= 3);
    CHECK(req.target_role == "chosen-generator");
}

TEST_CASE("instantiate_sft is deterministic", "[templates]") {
    const auto e = entry_for("selam", "peace");
    const auto a = instantiate_sft(e, dialogue_kind::role_play, 42);
    const auto b = instantiate_sft(e, dialogue_kind::role_play, 42);
    CHECK(a.prompt_text == b.prompt_text);
    CHECK(a.request_id == b.request_id);
}

TEST_CASE("the 10 kinds yield 10 distinct prompts over one entry", "[templates]") {
    const auto e = entry_for("selam", "peace");
    std::set<std::string> prompts;
    for (auto k : all_dialogue_kinds) prompts.insert(instantiate_sft(e, k, 7).prompt_text);
    CHECK(prompts.size() == all_dialogue_kinds.size());
}

TEST_CASE("no instantiated prompt carries residual slot markers", "[templates][property]") {
    const auto corpus = std::vector<dict_entry>{entry_for("selam", "peace"),
                                                entry_for("buna", "coffee", "amh", "e:2"),
                                                entry_for("jambo", "hello", "swa", "e:3")};
    wrong_gloss_pool pool(corpus, "amh");
    for (const auto& e : corpus) {
        for (auto k : all_dialogue_kinds) {
            const auto req = instantiate_sft(e, k, 3);
            CHECK_FALSE(contains(req.prompt_text, "[WORD]"));
            CHECK_FALSE(contains(req.prompt_text, "[WRONG_MEANING]"));
        }
        for (auto t : all_negative_query_types) {
            auto [c, r] = instantiate_dpo(e, t, pair_quality_combo::incorrect_query_correct_response,
                                          5, template_library::builtin(), pool);
            for (const auto* req : {&c, &r}) {
                CHECK_FALSE(contains(req->prompt_text, "[WORD]"));
                CHECK_FALSE(contains(req->prompt_text, "[WRONG_MEANING]"));
                CHECK_FALSE(contains(req->prompt_text, "[QUERY]"));
                CHECK_FALSE(contains(req->prompt_text, "[MISSPELLED]"));
            }
        }
    }
}

TEST_CASE("dpo pair shares the learner query and splits roles", "[templates]") {
    const auto e = entry_for("selam", "peace");
    wrong_gloss_pool pool;
    auto [chosen, rejected] =
        instantiate_dpo(e, negative_query_type::factually_wrong_premise,
                        pair_quality_combo::incorrect_query_correct_response, 9,
                        template_library::builtin(), pool);
    CHECK(chosen.target_role == "chosen-generator");
    CHECK(rejected.target_role == "rejected-generator");
    CHECK(chosen.query_text == rejected.query_text);
    CHECK(chosen.pair_id == rejected.pair_id);
    CHECK(chosen.request_id != rejected.request_id);
    // wrong-premise query embeds a wrong meaning, not the real gloss
    CHECK(contains(chosen.query_text, "means"));
    CHECK_FALSE(contains(chosen.query_text, "\"peace\""));
}

TEST_CASE("correct-query combos reject a negative type", "[templates]") {
    const auto e = entry_for("selam", "peace");
    CHECK_THROWS_AS(instantiate_dpo(e, negative_query_type::vague_ambiguous,
                                    pair_quality_combo::correct_query_correct_response, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(instantiate_dpo(e, std::nullopt,
                                    pair_quality_combo::incorrect_query_correct_response, 1),
                    std::invalid_argument);
    // and the two correct-query combos instantiate fine without one
    CHECK_NOTHROW(instantiate_dpo(e, std::nullopt,
                                  pair_quality_combo::correct_query_correct_response, 1));
    CHECK_NOTHROW(instantiate_dpo(e, std::nullopt,
                                  pair_quality_combo::correct_query_incorrect_response, 1));
}

TEST_CASE("misspelling stays within edit distance 1..3 over a 50-entry fixture",
          "[templates][property]") {
    std::vector<std::string> words{"selam",  "buna",   "jambo",   "habari", "sawubona",
                                   "mti",    "wuha",   "dabo",    "hager",  "ababa",
                                   "ሰላም", "bàbá", "ọmọ"};
    split_mix64 rng(2026);
    while (words.size() < 50) {
        std::string w;
        const auto len = 2 + rng.bounded(9);
        for (std::uint64_t i = 0; i < len; ++i)
            w.push_back(static_cast<char>('a' + rng.bounded(26)));
        words.push_back(std::move(w));
    }
    for (const auto& w : words) {
        for (std::uint64_t seed = 0; seed < 4; ++seed) {
            const auto m = misspell(w, seed);
            const int d = testutil::levenshtein(w, m);
            INFO("word=" << w << " misspelled=" << m);
            CHECK(d >= 1);
            CHECK(d <= 3);
            CHECK(misspell(w, seed) == m);  // deterministic
        }
    }
}

TEST_CASE("misspelled query uses the perturbed form, not the headword", "[templates]") {
    const auto e = entry_for("selam", "peace");
    auto [chosen, rejected] =
        instantiate_dpo(e, negative_query_type::misspelled_typo,
                        pair_quality_combo::incorrect_query_correct_response, 3);
    const auto quoted = "\"" + e.headword + "\"";
    CHECK_FALSE(contains(chosen.query_text, quoted));
    (void)rejected;
}

// ---------------------------------------------------------------------------
// planning
// ---------------------------------------------------------------------------

namespace {
std::vector<dict_entry> fixture_corpus(int n, const std::string& lang = "amh") {
    std::vector<dict_entry> corpus;
    for (int i = 0; i < n; ++i) {
        auto e = entry_for("word" + std::to_string(i), "gloss" + std::to_string(i), lang,
                           lang + ":" + std::to_string(i));
        corpus.push_back(std::move(e));
    }
    return corpus;
}
}  // namespace

TEST_CASE("all-zero quotas plan nothing", "[templates]") {
    batch_quotas quotas;
    CHECK(plan_batch(fixture_corpus(10), quotas, 1).empty());
}

TEST_CASE("a quota of 5 direct_qa yields exactly 5 requests", "[templates]") {
    batch_quotas quotas;
    quotas.sft[dialogue_kind::direct_qa] = 5;
    const auto plan = plan_batch(fixture_corpus(100), quotas, 1);
    REQUIRE(plan.size() == 5);
    for (const auto& req : plan) {
        CHECK(req.cls == request_class::sft_dialogue);
        CHECK(req.kind == dialogue_kind::direct_qa);
    }
    std::set<std::string> ids;
    for (const auto& req : plan) ids.insert(req.request_id);
    CHECK(ids.size() == plan.size());
}

TEST_CASE("positive quota over an empty corpus is a planning error", "[templates]") {
    batch_quotas quotas;
    quotas.sft[dialogue_kind::direct_qa] = 1;
    CHECK_THROWS_AS(plan_batch({}, quotas, 1), data_error);
}

TEST_CASE("uniform kind sampling stays within 3 sigma over 10000 draws", "[templates]") {
    // binomial n=10000, p=0.1: sigma = sqrt(900) = 30, so 1000 +/- 90
    const auto plan = plan_uniform_sft(fixture_corpus(50), 10000, 77);
    REQUIRE(plan.size() == 10000);
    std::map<dialogue_kind, int> freq;
    for (const auto& req : plan) ++freq[req.kind];
    for (auto k : all_dialogue_kinds) {
        INFO("kind=" << to_string(k) << " count=" << freq[k]);
        CHECK(freq[k] >= 910);
        CHECK(freq[k] <= 1090);
    }
}

TEST_CASE("plan is invariant to corpus input ordering", "[templates][property]") {
    auto corpus = fixture_corpus(30);
    batch_quotas quotas = batch_quotas::full_coverage(2, 1);
    const auto plan_sorted = plan_batch(corpus, quotas, 5);
    std::reverse(corpus.begin(), corpus.end());
    const auto plan_reversed = plan_batch(corpus, quotas, 5);
    REQUIRE(plan_sorted.size() == plan_reversed.size());
    for (std::size_t i = 0; i < plan_sorted.size(); ++i) {
        CHECK(plan_sorted[i].request_id == plan_reversed[i].request_id);
        CHECK(plan_sorted[i].prompt_text == plan_reversed[i].prompt_text);
    }
}

TEST_CASE("full coverage planning hits every dpo cell", "[templates]") {
    const auto plan = plan_batch(fixture_corpus(20), batch_quotas::full_coverage(1, 1), 3);
    // 10 sft + 7 cells x 2 requests
    CHECK(plan.size() == 10 + 7 * 2);
    std::set<std::string> cells;
    for (const auto& req : plan) {
        if (req.cls != request_class::dpo_response) continue;
        cells.insert((req.negative_type ? std::string(to_string(*req.negative_type)) : "none") +
                     "/" + std::string(to_string(req.combo)));
    }
    CHECK(cells.size() == 7);
}

// ---------------------------------------------------------------------------
// template data files
// ---------------------------------------------------------------------------

TEST_CASE("shipped template files match the builtin library", "[templates]") {
    const auto lib = template_library::load_dir(testutil::shipped_data_dir() / "templates");
    const auto& builtin = template_library::builtin();
    for (auto k : all_dialogue_kinds) CHECK(lib.sft(k) == builtin.sft(k));
    for (auto t : all_negative_query_types)
        CHECK(lib.negative_query(t) == builtin.negative_query(t));
    CHECK(lib.correct_query() == builtin.correct_query());
    CHECK(lib.chosen_instructions() == builtin.chosen_instructions());
    CHECK(lib.rejected_instructions() == builtin.rejected_instructions());
}

TEST_CASE("template overrides from a directory take effect", "[templates]") {
    testutil::temp_dir dir;
    std::filesystem::create_directories(dir.path() / "sft");
    {
        std::ofstream out(dir.path() / "sft" / "direct_qa.txt");
        out << "Explain [WORD] ([MEANING]) in [LANGUAGE]. [MIN_TURNS] turns.\n";
    }
    const auto lib = template_library::load_dir(dir.path());
    const auto req = instantiate_sft(entry_for("selam", "peace"), dialogue_kind::direct_qa, 1, lib);
    CHECK(req.prompt_text == "Explain selam (peace) in Amharic. 3 turns.");
    // untouched kinds still come from the builtin set
    CHECK(lib.sft(dialogue_kind::role_play) == template_library::builtin().sft(dialogue_kind::role_play));
}
