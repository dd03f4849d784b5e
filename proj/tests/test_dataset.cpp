#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "lexitutor/dataset.hpp"
#include "test_helpers.hpp"

using namespace lexitutor;

namespace {

generation_record dialogue_record(const std::string& id, const std::string& entry,
                                  const std::string& lang = "amh",
                                  dialogue_kind kind = dialogue_kind::direct_qa) {
    tutor_dialogue d;
    d.dialogue_id = id;
    d.language = lang;
    d.kind = kind;
    d.entry_id = entry;
    d.turns = {{"learner", "q1 " + id}, {"tutor", "a1"}, {"learner", "q2"},
               {"tutor", "a2"},         {"learner", "q3"}, {"tutor", "a3"}};
    generation_record rec;
    rec.request.request_id = id;
    rec.request.cls = request_class::sft_dialogue;
    rec.request.entry_id = entry;
    rec.request.language = lang;
    rec.request.kind = kind;
    rec.status = gen_status::ok;
    rec.parsed = nlohmann::json(d);
    return rec;
}

generation_record dpo_record(const std::string& pair, bool chosen, const std::string& text,
                             gen_status status = gen_status::ok) {
    generation_record rec;
    rec.request.request_id = pair + (chosen ? "#chosen" : "#rejected");
    rec.request.cls = request_class::dpo_response;
    rec.request.pair_id = pair;
    rec.request.language = "amh";
    rec.request.entry_id = "e:1";
    rec.request.combo = pair_quality_combo::incorrect_query_correct_response;
    rec.request.negative_type = negative_query_type::misspelled_typo;
    rec.request.query_text = "What does slema mean?";
    rec.request.target_role = chosen ? "chosen-generator" : "rejected-generator";
    rec.backend = chosen ? "big-model" : "small-model";
    rec.status = status;
    if (status == gen_status::ok) rec.parsed = nlohmann::json{{"text", text}};
    return rec;
}

}  // namespace

TEST_CASE("build_sft partitions into disjoint train/test", "[dataset]") {
    std::vector<generation_record> records;
    for (int i = 0; i < 10; ++i)
        records.push_back(dialogue_record("d" + std::to_string(i), "e:" + std::to_string(i)));
    split_spec split;
    split.test_size = 2;
    split.seed = 5;
    const auto ds = build_sft(records, split);
    CHECK(ds.train.size() == 8);
    CHECK(ds.test.size() == 2);
    std::set<std::string> train_ids, test_ids;
    for (const auto& d : ds.train) train_ids.insert(d.dialogue_id);
    for (const auto& d : ds.test) test_ids.insert(d.dialogue_id);
    for (const auto& id : test_ids) CHECK_FALSE(train_ids.count(id));
    CHECK(train_ids.size() + test_ids.size() == 10);
}

TEST_CASE("dialogues from one entry land in the same split", "[dataset]") {
    std::vector<generation_record> records;
    // 12 dialogues over 6 entries, 2 each
    for (int i = 0; i < 12; ++i)
        records.push_back(
            dialogue_record("d" + std::to_string(i), "e:" + std::to_string(i / 2)));
    split_spec split;
    split.test_size = 4;
    split.seed = 9;
    const auto ds = build_sft(records, split);
    CHECK(ds.train.size() + ds.test.size() == 12);
    std::map<std::string, std::set<std::string>> entry_split;
    for (const auto& d : ds.train) entry_split[d.entry_id].insert("train");
    for (const auto& d : ds.test) entry_split[d.entry_id].insert("test");
    for (const auto& [entry, sides] : entry_split) {
        INFO("entry " << entry);
        CHECK(sides.size() == 1);
    }
}

TEST_CASE("split is deterministic under the seed and input order", "[dataset][property]") {
    std::vector<generation_record> records;
    for (int i = 0; i < 30; ++i)
        records.push_back(dialogue_record("d" + std::to_string(i), "e:" + std::to_string(i)));
    split_spec split;
    split.test_size = 7;
    split.seed = 123;
    const auto a = build_sft(records, split);
    std::reverse(records.begin(), records.end());
    const auto b = build_sft(records, split);
    REQUIRE(a.test.size() == b.test.size());
    for (std::size_t i = 0; i < a.test.size(); ++i)
        CHECK(a.test[i].dialogue_id == b.test[i].dialogue_id);
    split.seed = 124;
    const auto c = build_sft(records, split);
    std::set<std::string> t_a, t_c;
    for (const auto& d : a.test) t_a.insert(d.dialogue_id);
    for (const auto& d : c.test) t_c.insert(d.dialogue_id);
    CHECK(t_a != t_c);  // different seed, different draw (30 choose 7 makes collision negligible)
}

TEST_CASE("oversized test request names the language", "[dataset]") {
    std::vector<generation_record> records{dialogue_record("d0", "e:0", "zul")};
    split_spec split;
    split.test_size = 5;
    try {
        build_sft(records, split);
        FAIL("expected data_error");
    } catch (const data_error& e) {
        CHECK(contains(e.what(), "zul"));
    }
}

TEST_CASE("fractional split rounds up per language", "[dataset]") {
    std::vector<generation_record> records;
    for (int i = 0; i < 10; ++i)
        records.push_back(dialogue_record("d" + std::to_string(i), "e:" + std::to_string(i)));
    split_spec split;
    split.test_fraction = 0.25;
    split.seed = 1;
    const auto ds = build_sft(records, split);
    CHECK(ds.test.size() == 3);  // ceil(2.5)
}

TEST_CASE("non-ok records are excluded from datasets", "[dataset]") {
    std::vector<generation_record> records{dialogue_record("d0", "e:0"),
                                           dialogue_record("d1", "e:1")};
    records[1].status = gen_status::parse_failed;
    records[1].parsed.reset();
    split_spec split;
    split.test_size = 0;
    const auto ds = build_sft(records, split);
    CHECK(ds.train.size() + ds.test.size() == 1);
}

// ---------------------------------------------------------------------------
// DPO
// ---------------------------------------------------------------------------

TEST_CASE("matched lineage yields one preference pair", "[dataset]") {
    const auto result = build_dpo({dpo_record("p1", true, "rich answer")},
                                  {dpo_record("p1", false, "weak answer")});
    REQUIRE(result.pairs.size() == 1);
    CHECK(result.unmatched.empty());
    CHECK(result.quarantined.empty());
    const auto& p = result.pairs[0];
    CHECK(p.chosen == "rich answer");
    CHECK(p.rejected == "weak answer");
    CHECK(p.chosen != p.rejected);
    CHECK(p.prompt == "What does slema mean?");
    CHECK(p.chosen_backend == "big-model");
    CHECK(p.rejected_backend == "small-model");
    CHECK(p.negative_type == negative_query_type::misspelled_typo);
}

TEST_CASE("rejected record with no chosen twin is reported", "[dataset]") {
    const auto result = build_dpo({dpo_record("p1", true, "a")},
                                  {dpo_record("p1", false, "b"), dpo_record("p2", false, "c")});
    CHECK(result.pairs.size() == 1);
    REQUIRE(result.unmatched.size() == 1);
    CHECK(result.unmatched[0] == "p2#rejected");
}

TEST_CASE("identical chosen and rejected is quarantined", "[dataset]") {
    const auto result =
        build_dpo({dpo_record("p1", true, "same")}, {dpo_record("p1", false, "same")});
    CHECK(result.pairs.empty());
    REQUIRE(result.quarantined.size() == 1);
    CHECK(result.quarantined[0].pair_id == "p1");
}

TEST_CASE("failed records do not silently vanish", "[dataset]") {
    const auto result =
        build_dpo({dpo_record("p1", true, "", gen_status::exhausted_retries)},
                  {dpo_record("p1", false, "weak")});
    CHECK(result.pairs.empty());
    REQUIRE(result.unmatched.size() == 1);
    CHECK(result.unmatched[0] == "p1#chosen");
}

// ---------------------------------------------------------------------------
// emission round-trips
// ---------------------------------------------------------------------------

TEST_CASE("sft emission round-trips losslessly", "[dataset][property]") {
    std::vector<tutor_dialogue> dialogues;
    split_mix64 rng(6);
    for (int i = 0; i < 200; ++i) {
        tutor_dialogue d;
        d.dialogue_id = "d" + std::to_string(i);
        d.language = i % 2 ? "amh" : "swa";
        d.kind = all_dialogue_kinds[rng.bounded(10)];
        d.entry_id = "e:" + std::to_string(rng.bounded(50));
        if (i % 7 == 0) d.system_preamble = "You are a helpful tutor.";
        const int exchanges = 3 + static_cast<int>(rng.bounded(3));
        for (int t = 0; t < exchanges; ++t) {
            d.turns.push_back({"learner", "question \"quoted\" #" + std::to_string(t)});
            d.turns.push_back({"tutor", "answer\nwith a newline " + std::to_string(t)});
        }
        dialogues.push_back(std::move(d));
    }
    testutil::temp_dir dir;
    const auto path = dir / "sft.jsonl";
    emit_sft(dialogues, path);
    const auto back = read_sft(path);
    REQUIRE(back.size() == dialogues.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].dialogue_id == dialogues[i].dialogue_id);
        CHECK(back[i].language == dialogues[i].language);
        CHECK(back[i].kind == dialogues[i].kind);
        CHECK(back[i].entry_id == dialogues[i].entry_id);
        CHECK(back[i].system_preamble == dialogues[i].system_preamble);
        CHECK(back[i].turns == dialogues[i].turns);
    }
}

TEST_CASE("dpo emission round-trips losslessly", "[dataset][property]") {
    std::vector<preference_pair> pairs;
    split_mix64 rng(8);
    for (int i = 0; i < 150; ++i) {
        preference_pair p;
        p.pair_id = "p" + std::to_string(i);
        p.language = i % 3 ? "yor" : "tir";
        p.prompt = "prompt " + std::to_string(rng.next() % 100);
        p.chosen = "chosen\n" + std::to_string(i);
        p.rejected = "rejected " + std::to_string(i);
        p.combo = all_pair_quality_combos[rng.bounded(3)];
        if (p.combo == pair_quality_combo::incorrect_query_correct_response)
            p.negative_type = all_negative_query_types[rng.bounded(5)];
        p.entry_id = "e:" + std::to_string(i);
        p.chosen_backend = "a";
        p.rejected_backend = "b";
        pairs.push_back(std::move(p));
    }
    testutil::temp_dir dir;
    const auto path = dir / "dpo.jsonl";
    emit_dpo(pairs, path);
    const auto back = read_dpo(path);
    REQUIRE(back.size() == pairs.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].pair_id == pairs[i].pair_id);
        CHECK(back[i].prompt == pairs[i].prompt);
        CHECK(back[i].chosen == pairs[i].chosen);
        CHECK(back[i].rejected == pairs[i].rejected);
        CHECK(back[i].combo == pairs[i].combo);
        CHECK(back[i].negative_type == pairs[i].negative_type);
    }
}

TEST_CASE("empty dataset emits an empty file with no header artifacts", "[dataset]") {
    testutil::temp_dir dir;
    const auto path = dir / "empty.jsonl";
    emit_sft({}, path);
    std::ifstream in(path);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(content.empty());
    CHECK(read_sft(path).empty());
}

TEST_CASE("split-by-language writes one file per language", "[dataset]") {
    std::vector<tutor_dialogue> mixed;
    for (int i = 0; i < 6; ++i) {
        tutor_dialogue d;
        d.dialogue_id = "d" + std::to_string(i);
        d.language = i % 2 ? "amh" : "zul";
        d.kind = dialogue_kind::direct_qa;
        d.entry_id = "e";
        d.turns = {{"learner", "q"}, {"tutor", "a"}, {"learner", "q"},
                   {"tutor", "a"},   {"learner", "q"}, {"tutor", "a"}};
        mixed.push_back(std::move(d));
    }
    testutil::temp_dir dir;
    const auto written = emit_by_language(mixed, dir / "sft.jsonl", emit_sft);
    REQUIRE(written.size() == 2);
    CHECK(read_sft(written[0]).size() == 3);
    CHECK(read_sft(written[1]).size() == 3);
}

TEST_CASE("sft chat schema uses user/assistant roles", "[dataset]") {
    tutor_dialogue d;
    d.dialogue_id = "d";
    d.language = "amh";
    d.kind = dialogue_kind::direct_qa;
    d.entry_id = "e";
    d.system_preamble = "Be kind.";
    d.turns = {{"learner", "q"}, {"tutor", "a"}};
    const auto j = sft_chat_json(d);
    REQUIRE(j.at("messages").size() == 3);
    CHECK(j.at("messages").at(0).at("role") == "system");
    CHECK(j.at("messages").at(1).at("role") == "user");
    CHECK(j.at("messages").at(2).at("role") == "assistant");
    const auto back = sft_chat_from_json(j);
    CHECK(back.turns == d.turns);
    CHECK(back.system_preamble == d.system_preamble);
}
