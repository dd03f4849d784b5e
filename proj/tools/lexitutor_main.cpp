// lexitutor: dictionary-seeded language-tutoring dataset pipeline.
//
// Subcommands: ingest, generate, build-dataset, evaluate, judge, influence,
// report. Exit codes: 0 success, 1 data/validation failure, 2 usage or
// configuration failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lexitutor/config.hpp"
#include "lexitutor/dataset.hpp"
#include "lexitutor/dict.hpp"
#include "lexitutor/http_backend.hpp"
#include "lexitutor/influence.hpp"
#include "lexitutor/judge.hpp"
#include "lexitutor/metrics/chrf.hpp"
#include "lexitutor/metrics/rouge.hpp"
#include "lexitutor/orchestrator.hpp"
#include "lexitutor/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lexitutor;

namespace {

struct global_flags {
    std::string config_path;
    std::optional<std::uint64_t> seed_override;
    bool strict = false;
    bool dry_run = false;
};

pipeline_config require_config(const global_flags& g) {
    if (g.config_path.empty()) throw config_error("this subcommand needs --config");
    auto cfg = load_config(g.config_path);
    if (g.seed_override) {
        cfg.seed = *g.seed_override;
        cfg.split.seed = *g.seed_override;
    }
    return cfg;
}

std::unique_ptr<text_backend> make_backend(const std::string& choice, const backend_spec& spec) {
    if (choice == "mock") return std::make_unique<mock_backend>();
    if (choice == "http") {
        if (spec.endpoint.empty())
            throw config_error("backend '" + spec.name + "' has no endpoint configured");
        return std::make_unique<http_backend>(spec);
    }
    throw config_error("unknown backend choice '" + choice + "' (expected mock or http)");
}

json load_json_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot read " + path.string());
    json j;
    in >> j;
    return j;
}

template <typename T>
void write_json_file(const fs::path& path, const T& value) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot write " + path.string());
    out << json(value).dump(1) << "\n";
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot read " + path.string());
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// {id, language, kind?, text} rows used by the evaluate/judge interchange
struct text_row {
    std::string id;
    std::string language;
    std::string kind;
    std::string text;
};

std::vector<text_row> read_text_rows(const fs::path& path) {
    std::vector<text_row> rows;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot read " + path.string());
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim_view(line).empty()) continue;
        try {
            const auto j = json::parse(line);
            rows.push_back({j.at("id").get<std::string>(), j.value("language", ""),
                            j.value("kind", ""), j.at("text").get<std::string>()});
        } catch (const std::exception& e) {
            throw data_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return rows;
}

void write_text_rows(const std::vector<text_row>& rows, const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot write " + path.string());
    for (const auto& r : rows) {
        json j{{"id", r.id}, {"language", r.language}, {"text", r.text}};
        if (!r.kind.empty()) j["kind"] = r.kind;
        out << j.dump() << "\n";
    }
}

template_library effective_templates(const pipeline_config& cfg) {
    if (cfg.template_dir) return template_library::load_dir(*cfg.template_dir);
    return template_library::builtin();
}

// ---------------------------------------------------------------------------
// ingest
// ---------------------------------------------------------------------------

int cmd_ingest(const global_flags& g, const fs::path& out_dir) {
    const auto cfg = require_config(g);
    if (cfg.sources.empty()) throw config_error("config has no sources to ingest");
    fs::create_directories(out_dir);

    std::vector<dict_entry> all_entries;
    json rejects_json = json::array();
    int total_rejects = 0;
    for (const auto& src : cfg.sources) {
        const auto result =
            parse_source(read_file(src.path), src.profile, src.language, src.source_id);
        for (const auto& e : result.entries) all_entries.push_back(e);
        for (const auto& r : result.rejects) {
            rejects_json.push_back({{"source", src.source_id},
                                    {"line", r.line},
                                    {"text", r.text},
                                    {"reason", r.reason}});
            ++total_rejects;
        }
    }

    auto [deduped, dedupe_stats] = dedupe(std::move(all_entries));
    const std::set<std::string> langs(cfg.languages.begin(), cfg.languages.end());
    auto stats = validate_corpus(deduped, std::nullopt, g.strict,
                                 langs.empty() ? default_languages() : langs);
    stats.duplicates_removed = dedupe_stats.duplicates_removed;
    stats.parse_failures = total_rejects;

    std::map<std::string, std::vector<dict_entry>> by_lang;
    for (auto& e : deduped) by_lang[e.language].push_back(std::move(e));
    for (const auto& [lang, entries] : by_lang) {
        std::ofstream out(out_dir / ("corpus." + lang + ".jsonl"), std::ios::binary);
        for (const auto& e : entries) out << json(e).dump() << "\n";
    }

    json report = json(stats);
    report["rejects"] = rejects_json;
    write_json_file(out_dir / "ingest_stats.json", report);
    std::cout << report.dump(1) << "\n";

    if (g.strict && total_rejects > 0) {
        std::cerr << "strict mode: " << total_rejects << " rejected line(s)\n";
        return 1;
    }
    return 0;
}

std::vector<dict_entry> load_corpus(const pipeline_config& cfg, const fs::path& corpus_dir) {
    std::vector<dict_entry> corpus;
    const auto langs = cfg.languages.empty()
                           ? std::vector<std::string>(default_languages().begin(),
                                                      default_languages().end())
                           : cfg.languages;
    for (const auto& lang : langs) {
        const auto path = corpus_dir / ("corpus." + lang + ".jsonl");
        if (!fs::exists(path)) continue;
        std::ifstream in(path, std::ios::binary);
        std::string line;
        while (std::getline(in, line)) {
            if (trim_view(line).empty()) continue;
            corpus.push_back(json::parse(line).get<dict_entry>());
        }
    }
    if (corpus.empty())
        throw data_error("no corpus entries found under " + corpus_dir.string() +
                         " (run ingest first)");
    return corpus;
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

int cmd_generate(const global_flags& g, const fs::path& corpus_dir, const fs::path& out_dir,
                 const std::string& backend_choice, const std::string& answers_path,
                 const std::string& answers_out) {
    const auto cfg = require_config(g);
    fs::create_directories(out_dir);
    const auto lib = effective_templates(cfg);

    if (!answers_path.empty()) {
        // single-response generation over a questions file
        if (answers_out.empty()) throw config_error("--answers requires --out");
        std::vector<generation_request> requests;
        const auto questions = read_text_rows(answers_path);
        for (const auto& q : questions) {
            generation_request req;
            req.cls = request_class::dpo_response;
            req.request_id = "ans-" + q.id;
            req.entry_id = q.id;
            req.language = q.language;
            req.combo = pair_quality_combo::correct_query_correct_response;
            req.target_role = "chosen-generator";
            req.seed = mix_seed(cfg.seed, fnv1a(q.id));
            req.pair_id = "ans-" + q.id;
            req.query_text = q.text;
            req.prompt_text = "You are an expert " + language_name(q.language) +
                              " tutor. Answer the learner message below accurately and "
                              "pedagogically.\nLearner message:\n" + q.text;
            requests.push_back(std::move(req));
        }
        if (g.dry_run) {
            for (const auto& r : requests) std::cout << r.request_id << "\n";
            std::cout << "dry-run: " << requests.size() << " answer requests, 0 backend calls\n";
            return 0;
        }
        auto backend = make_backend(backend_choice, cfg.chosen_backend);
        const auto records = run_batch(requests, *backend, cfg.chosen_backend,
                                       out_dir / "records.answers.jsonl");
        std::vector<text_row> predictions;
        int failures = 0;
        for (std::size_t i = 0; i < records.size(); ++i) {
            if (auto text = records[i].response_text()) {
                predictions.push_back(
                    {questions[i].id, questions[i].language, questions[i].kind, *text});
            } else {
                ++failures;
            }
        }
        write_text_rows(predictions, answers_out);
        std::cout << "answered " << predictions.size() << "/" << questions.size() << " questions\n";
        return failures > 0 && g.strict ? 1 : 0;
    }

    const auto corpus = load_corpus(cfg, corpus_dir);
    std::map<std::string, std::vector<dict_entry>> by_lang;
    for (const auto& e : corpus) by_lang[e.language].push_back(e);

    batch_quotas quotas;
    if (cfg.sft_quotas.empty()) {
        quotas = batch_quotas::full_coverage(1, cfg.dpo_pairs_per_cell);
    } else {
        for (const auto& [kind, n] : cfg.sft_quotas) quotas.sft[parse_dialogue_kind(kind)] = n;
        for (negative_query_type t : all_negative_query_types)
            quotas.dpo[{t, pair_quality_combo::incorrect_query_correct_response}] =
                cfg.dpo_pairs_per_cell;
        quotas.dpo[{std::nullopt, pair_quality_combo::correct_query_correct_response}] =
            cfg.dpo_pairs_per_cell;
        quotas.dpo[{std::nullopt, pair_quality_combo::correct_query_incorrect_response}] =
            cfg.dpo_pairs_per_cell;
    }

    std::vector<generation_request> chosen_side, rejected_side;
    for (const auto& [lang, entries] : by_lang) {
        const auto plan = plan_batch(entries, quotas, mix_seed(cfg.seed, fnv1a(lang)), lib);
        for (const auto& req : plan)
            (req.target_role == "rejected-generator" ? rejected_side : chosen_side).push_back(req);
    }

    if (g.dry_run) {
        for (const auto* side : {&chosen_side, &rejected_side})
            for (const auto& r : *side)
                std::cout << r.request_id << "  " << to_string(r.cls) << "  " << r.language << "\n";
        std::cout << "dry-run: " << chosen_side.size() + rejected_side.size()
                  << " planned requests, 0 backend calls\n";
        return 0;
    }

    auto chosen_backend = make_backend(backend_choice, cfg.chosen_backend);
    auto rejected_backend = make_backend(backend_choice, cfg.rejected_backend);
    const auto chosen_records = run_batch(chosen_side, *chosen_backend, cfg.chosen_backend,
                                          out_dir / "records.chosen.jsonl");
    const auto rejected_records = run_batch(rejected_side, *rejected_backend, cfg.rejected_backend,
                                            out_dir / "records.rejected.jsonl");

    int ok = 0, failed = 0;
    for (const auto* records : {&chosen_records, &rejected_records})
        for (const auto& rec : *records) (rec.status == gen_status::ok ? ok : failed) += 1;
    std::cout << "generated " << ok << " ok, " << failed << " failed; records in "
              << out_dir.string() << "\n";
    return failed > 0 && g.strict ? 1 : 0;
}

// ---------------------------------------------------------------------------
// build-dataset
// ---------------------------------------------------------------------------

int cmd_build_dataset(const global_flags& g, const fs::path& records_dir, const fs::path& out_dir,
                      bool split_by_language) {
    const auto cfg = require_config(g);
    fs::create_directories(out_dir);

    auto load_records = [](const fs::path& path) {
        std::vector<generation_record> records;
        if (!fs::exists(path)) return records;
        for (const auto& [id, rec] : load_checkpoint(path)) records.push_back(rec);
        return records;
    };
    const auto chosen_records = load_records(records_dir / "records.chosen.jsonl");
    const auto rejected_records = load_records(records_dir / "records.rejected.jsonl");
    if (chosen_records.empty())
        throw data_error("no generation records under " + records_dir.string());

    std::vector<generation_record> sft_records, dpo_chosen;
    for (const auto& rec : chosen_records) {
        if (rec.request.cls == request_class::sft_dialogue)
            sft_records.push_back(rec);
        else if (rec.request.cls == request_class::dpo_response)
            dpo_chosen.push_back(rec);
    }

    const auto sft = build_sft(sft_records, cfg.split);
    const auto dpo = build_dpo(dpo_chosen, rejected_records);

    if (split_by_language) {
        emit_by_language(sft.train, out_dir / "sft.train.jsonl", emit_sft);
        emit_by_language(sft.test, out_dir / "sft.test.jsonl", emit_sft);
        emit_by_language(dpo.pairs, out_dir / "dpo.jsonl", emit_dpo);
    } else {
        emit_sft(sft.train, out_dir / "sft.train.jsonl");
        emit_sft(sft.test, out_dir / "sft.test.jsonl");
        emit_dpo(dpo.pairs, out_dir / "dpo.jsonl");
    }

    // evaluation inputs drawn from the held-out test split: the first learner
    // turn is the question, the first tutor turn the reference answer
    std::vector<text_row> questions, references;
    for (const auto& d : sft.test) {
        if (d.turns.size() < 2) continue;
        questions.push_back(
            {d.dialogue_id, d.language, std::string(to_string(d.kind)), d.turns[0].content});
        references.push_back(
            {d.dialogue_id, d.language, std::string(to_string(d.kind)), d.turns[1].content});
    }
    write_text_rows(questions, out_dir / "eval.questions.jsonl");
    write_text_rows(references, out_dir / "eval.references.jsonl");

    // per-language, per-kind counts
    json per_language = json::object();
    auto bump = [](json& obj, const std::string& key) {
        if (!obj.is_object()) obj = json::object();
        obj[key] = (obj.contains(key) ? obj.at(key).get<int>() : 0) + 1;
    };
    auto count_lang = [&](const std::vector<tutor_dialogue>& ds, const char* key) {
        for (const auto& d : ds) {
            auto& row = per_language[d.language];
            bump(row, key);
            bump(row["kinds"], std::string(to_string(d.kind)));
        }
    };
    count_lang(sft.train, "sft_train");
    count_lang(sft.test, "sft_test");
    for (const auto& p : dpo.pairs) bump(per_language[p.language], "dpo");
    json stats{{"per_language", per_language},
               {"sft_train", sft.train.size()},
               {"sft_test", sft.test.size()},
               {"dpo_pairs", dpo.pairs.size()},
               {"dpo_unmatched", dpo.unmatched},
               {"dpo_quarantined", json::array()}};
    for (const auto& q : dpo.quarantined)
        stats["dpo_quarantined"].push_back({{"pair_id", q.pair_id}, {"reason", q.reason}});
    write_json_file(out_dir / "dataset_stats.json", stats);
    std::cout << stats.dump(1) << "\n";
    (void)g;
    return 0;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

int cmd_evaluate(const global_flags& g, const fs::path& predictions_path,
                 const fs::path& references_path, const std::string& out_path) {
    chrf_config chrf_cfg;
    if (!g.config_path.empty()) chrf_cfg = require_config(g).chrf;

    const auto predictions = read_text_rows(predictions_path);
    const auto references = read_text_rows(references_path);
    std::map<std::string, const text_row*> ref_by_id;
    for (const auto& r : references) ref_by_id[r.id] = &r;

    metric_report report;
    for (const auto& p : predictions) {
        auto it = ref_by_id.find(p.id);
        if (it == ref_by_id.end()) {
            std::cerr << "missing reference row for id '" << p.id << "'\n";
            return 1;
        }
        const auto rouge = rouge_l(p.text, it->second->text);
        report.rows.push_back({p.id, p.language.empty() ? it->second->language : p.language,
                               chrf_pp(p.text, it->second->text, chrf_cfg), rouge.f1,
                               rouge.precision, rouge.recall});
    }
    if (!out_path.empty()) write_json_file(fs::path(out_path), report.to_json());
    std::cout << report.render_text();
    return 0;
}

// ---------------------------------------------------------------------------
// judge
// ---------------------------------------------------------------------------

int cmd_judge(const global_flags& g, const fs::path& questions_path,
              const fs::path& candidates_path, const fs::path& out_dir,
              const std::string& backend_choice, const std::string& group_by) {
    const auto cfg = require_config(g);
    fs::create_directories(out_dir);

    const auto questions = read_text_rows(questions_path);
    const auto candidates = read_text_rows(candidates_path);
    std::map<std::string, const text_row*> question_by_id;
    for (const auto& q : questions) question_by_id[q.id] = &q;

    std::vector<judge_item> items;
    for (const auto& c : candidates) {
        auto it = question_by_id.find(c.id);
        if (it == question_by_id.end()) {
            std::cerr << "candidate '" << c.id << "' has no question row\n";
            return 1;
        }
        items.push_back({c.id, it->second->text, c.text,
                         c.language.empty() ? it->second->language : c.language,
                         c.kind.empty() ? it->second->kind : c.kind});
    }
    if (g.dry_run) {
        std::cout << "dry-run: " << items.size() << " judge items, 0 backend calls\n";
        return 0;
    }

    auto backend = make_backend(backend_choice, cfg.judge_backend);
    const auto outcomes =
        judge_batch(items, *backend, cfg.judge_backend, out_dir / "records.judge.jsonl");

    std::ofstream verdict_log(out_dir / "verdicts.jsonl", std::ios::binary | std::ios::trunc);
    int failures = 0;
    for (const auto& o : outcomes) {
        json j{{"item_id", o.item_id},
               {"language", o.language},
               {"kind", o.kind},
               {"attempts", o.attempts}};
        if (o.verdict) {
            j["verdict"] = *o.verdict;
        } else {
            j["failure_reason"] = o.failure_reason;
            ++failures;
        }
        verdict_log << j.dump() << "\n";
    }

    const auto agg = aggregate_verdicts(
        outcomes, group_by == "kind" ? verdict_group_by::kind : verdict_group_by::language);
    for (const auto& w : agg.warnings) std::cerr << "warning: " << w << "\n";
    write_json_file(out_dir / "criterion_table.json", criterion_table_json(agg.table));
    write_text_file(out_dir / "criterion_table.csv", criterion_table_csv(agg.table));
    std::cout << criterion_table_text(agg.table);
    std::cout << "verdicts: " << outcomes.size() - failures << " ok, " << failures << " failed\n";
    return failures > 0 && g.strict ? 1 : 0;
}

// ---------------------------------------------------------------------------
// influence
// ---------------------------------------------------------------------------

int cmd_influence(const global_flags& g, const fs::path& train_path, const fs::path& val_path,
                  double keep_fraction, const std::string& report_path,
                  const std::string& keep_list_path) {
    double fraction = keep_fraction;
    if (fraction <= 0.0 && !g.config_path.empty()) fraction = require_config(g).retention_fraction;
    if (fraction <= 0.0) fraction = 0.9;

    const auto train = read_gradients(train_path, "train");
    const auto val = read_gradients(val_path, "validation");
    auto rows = mean_influence(train.records, val.records);
    const auto kept = filter_top(rows, fraction);

    json rows_json = json::array();
    for (const auto& row : rows)
        rows_json.push_back({{"sample_id", row.sample_id},
                             {"mean_influence", row.mean_influence},
                             {"rank", row.rank},
                             {"keep", row.keep}});
    json report{{"train_count", train.records.size()},
                {"validation_count", val.records.size()},
                {"dimension", train.dimension},
                {"gradient_source", train.gradient_source},
                {"retention_fraction", fraction},
                {"kept", kept.size()},
                {"rows", rows_json}};
    if (!report_path.empty()) write_json_file(fs::path(report_path), report);

    if (!keep_list_path.empty()) {
        std::ofstream out(keep_list_path, std::ios::binary | std::ios::trunc);
        if (!out) throw io_error("cannot write " + keep_list_path);
        for (const auto& id : kept) out << id << "\n";
    }
    std::cout << "kept " << kept.size() << "/" << rows.size() << " samples (fraction "
              << format_fixed(fraction, 2) << ")\n";
    return 0;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

int cmd_report(const std::string& criterion_path, const std::string& metric_path,
               const std::string& reference_path, const std::string& model_name,
               const std::string& csv_out) {
    if (!criterion_path.empty()) {
        const auto table = criterion_table_from_json(load_json_file(criterion_path));
        std::cout << criterion_table_text(table);
        if (!csv_out.empty()) write_text_file(csv_out, criterion_table_csv(table));
        return 0;
    }
    if (!metric_path.empty()) {
        const auto j = load_json_file(metric_path);
        text_table table({"language", "chrf_pp", "rouge_l_f1"});
        double chrf_sum = 0, rouge_sum = 0;
        int n = 0;
        for (const auto& [lang, row] : j.at("per_language").items()) {
            table.add_row({lang, format_fixed(row.at("chrf_pp").get<double>(), 2),
                           format_fixed(row.at("rouge_l_f1").get<double>(), 4)});
            chrf_sum += row.at("chrf_pp").get<double>();
            rouge_sum += row.at("rouge_l_f1").get<double>();
            ++n;
        }
        if (n > 0)
            table.add_row({"Avg", format_fixed(chrf_sum / n, 2), format_fixed(rouge_sum / n, 4)});
        std::cout << table.render();
        return 0;
    }
    if (!reference_path.empty()) {
        const auto ref = load_json_file(reference_path);
        const auto languages = ref.at("languages").get<std::vector<std::string>>();
        for (const auto& model : ref.at("models")) {
            if (!model_name.empty() && model.at("name").get<std::string>() != model_name) continue;
            // rebuild each per-language overall cell from its four criterion
            // percentages
            criterion_table table;
            for (const auto& lang : languages)
                for (criterion c : all_criteria)
                    table.at(lang, c).percent = model.at("percentages")
                                                    .at(std::string(to_string(c)))
                                                    .at(lang)
                                                    .get<double>();
            const auto agg = aggregate_criteria(table);
            std::cout << model.at("name").get<std::string>() << "\n";
            std::vector<std::string> header{"row"};
            for (const auto& lang : languages) header.push_back(lang);
            header.push_back("Avg");
            text_table out(header);
            std::vector<std::string> cells{"overall"};
            for (const auto& lang : languages)
                cells.push_back(format_fixed(agg.per_group.at(lang), 2));
            cells.push_back(format_fixed(agg.overall, 2));
            out.add_row(cells);
            std::cout << out.render() << "\n";
        }
        return 0;
    }
    throw config_error("report needs --criterion-table, --metric-report, or --reference");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dictionary-seeded language-tutoring dataset pipeline"};
    app.require_subcommand(1);

    global_flags g;
    app.add_option("--config", g.config_path, "pipeline config file (JSON)");
    std::uint64_t seed_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value, "override the config seed");
    app.add_flag("--strict", g.strict, "treat data rejects/failures as errors");
    app.add_flag("--dry-run", g.dry_run, "plan only, no backend calls");

    auto* ingest = app.add_subcommand("ingest", "parse raw dictionary sources into a corpus");
    std::string ingest_out = "out";
    ingest->add_option("--out-dir", ingest_out, "output directory");

    auto* generate = app.add_subcommand("generate", "run generation requests against a backend");
    std::string gen_corpus = "out", gen_out = "out", gen_backend = "mock";
    std::string answers_in, answers_out;
    generate->add_option("--corpus-dir", gen_corpus, "directory with corpus.<lang>.jsonl files");
    generate->add_option("--out-dir", gen_out, "directory for record logs");
    generate->add_option("--backend", gen_backend, "mock | http");
    generate->add_option("--answers", answers_in, "questions file: answer mode");
    generate->add_option("--out", answers_out, "predictions output (answer mode)");

    auto* build = app.add_subcommand("build-dataset", "assemble SFT and DPO datasets");
    std::string build_records = "out", build_out = "out";
    bool by_language = false;
    build->add_option("--records-dir", build_records, "directory with record logs");
    build->add_option("--out-dir", build_out, "dataset output directory");
    build->add_flag("--split-by-language", by_language, "emit per-language files");

    auto* evaluate =
        app.add_subcommand("evaluate", "overlap metrics for predictions vs references");
    std::string eval_pred, eval_ref, eval_out;
    evaluate->add_option("--predictions", eval_pred, "predictions JSONL")->required();
    evaluate->add_option("--references", eval_ref, "references JSONL")->required();
    evaluate->add_option("--out", eval_out, "metric report JSON output");

    auto* judge = app.add_subcommand("judge", "LLM-judge scoring of candidates");
    std::string judge_questions, judge_candidates, judge_out = "out", judge_backend = "mock";
    std::string judge_group = "language";
    judge->add_option("--questions", judge_questions, "questions JSONL")->required();
    judge->add_option("--candidates", judge_candidates, "candidates JSONL")->required();
    judge->add_option("--out-dir", judge_out, "output directory");
    judge->add_option("--backend", judge_backend, "mock | http");
    judge->add_option("--group-by", judge_group, "language | kind");

    auto* influence_cmd = app.add_subcommand("influence", "gradient-based influence filtering");
    std::string inf_train, inf_val, inf_report, inf_keep_list;
    double inf_keep = -1.0;
    influence_cmd->add_option("--train-gradients", inf_train, "training gradient file")->required();
    influence_cmd->add_option("--val-gradients", inf_val, "validation gradient file")->required();
    influence_cmd->add_option("--keep", inf_keep, "retention fraction in (0,1]");
    influence_cmd->add_option("--out-report", inf_report, "report JSON output");
    influence_cmd->add_option("--out-keep-list", inf_keep_list, "keep-list text output");

    auto* report = app.add_subcommand("report", "render tables from report artifacts");
    std::string rep_criterion, rep_metric, rep_reference, rep_model, rep_csv;
    report->add_option("--criterion-table", rep_criterion, "criterion table JSON");
    report->add_option("--metric-report", rep_metric, "metric report JSON");
    report->add_option("--reference", rep_reference, "shipped benchmark reference JSON");
    report->add_option("--model", rep_model, "limit --reference rendering to one model");
    report->add_option("--csv", rep_csv, "also write CSV here");

    try {
        app.parse(argc, argv);
        if (*seed_opt) g.seed_override = seed_value;

        if (*ingest) return cmd_ingest(g, ingest_out);
        if (*generate)
            return cmd_generate(g, gen_corpus, gen_out, gen_backend, answers_in, answers_out);
        if (*build) return cmd_build_dataset(g, build_records, build_out, by_language);
        if (*evaluate) return cmd_evaluate(g, eval_pred, eval_ref, eval_out);
        if (*judge)
            return cmd_judge(g, judge_questions, judge_candidates, judge_out, judge_backend,
                             judge_group);
        if (*influence_cmd)
            return cmd_influence(g, inf_train, inf_val, inf_keep, inf_report, inf_keep_list);
        if (*report)
            return cmd_report(rep_criterion, rep_metric, rep_reference, rep_model, rep_csv);
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "argument error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
