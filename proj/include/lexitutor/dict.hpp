#pragma once

#include <algorithm>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "lexitutor/unicode.hpp"
#include "lexitutor/util.hpp"

namespace lexitutor {

// The ten language codes the shipped corpus covers (ISO 639-3).
inline const std::set<std::string>& default_languages() {
    static const std::set<std::string> langs{"amh", "hau", "ibo", "lin", "orm",
                                             "som", "swa", "tir", "yor", "zul"};
    return langs;
}

inline std::string language_name(std::string_view code) {
    static const std::map<std::string_view, std::string_view> names{
        {"amh", "Amharic"}, {"hau", "Hausa"},   {"ibo", "Igbo"},
        {"lin", "Lingala"}, {"orm", "Oromo"},   {"som", "Somali"},
        {"swa", "Swahili"}, {"tir", "Tigrinya"}, {"yor", "Yoruba"},
        {"zul", "Zulu"}};
    auto it = names.find(code);
    return it != names.end() ? std::string(it->second) : std::string(code);
}

// One normalized bilingual dictionary entry, the seed unit for generation.
// Optional text fields are empty strings when absent.
struct dict_entry {
    std::string entry_id;
    std::string headword;
    std::string language;                   // ISO 639-3
    std::vector<std::string> translations;  // ordered English glosses, >= 1
    std::string part_of_speech;
    std::string example;
    std::string notes;  // markdown; emphasis markers balanced after normalization
    std::string source_id;
    bool verified = false;  // native-speaker verification pass-through
};

inline void to_json(nlohmann::json& j, const dict_entry& e) {
    j = nlohmann::json{{"entry_id", e.entry_id}, {"headword", e.headword},
                       {"language", e.language}, {"translations", e.translations},
                       {"source_id", e.source_id}, {"verified", e.verified}};
    if (!e.part_of_speech.empty()) j["part_of_speech"] = e.part_of_speech;
    if (!e.example.empty()) j["example"] = e.example;
    if (!e.notes.empty()) j["notes"] = e.notes;
}

inline void from_json(const nlohmann::json& j, dict_entry& e) {
    j.at("entry_id").get_to(e.entry_id);
    j.at("headword").get_to(e.headword);
    j.at("language").get_to(e.language);
    j.at("translations").get_to(e.translations);
    e.source_id = j.value("source_id", "");
    e.verified = j.value("verified", false);
    e.part_of_speech = j.value("part_of_speech", "");
    e.example = j.value("example", "");
    e.notes = j.value("notes", "");
}

struct corpus_stats {
    std::map<std::string, int> per_language;
    std::map<std::string, int> per_source;
    int duplicates_removed = 0;
    int parse_failures = 0;
    std::vector<std::string> mismatches;  // filled by validate_corpus

    int total_retained() const {
        int n = 0;
        for (const auto& [lang, c] : per_language) n += c;
        return n;
    }
};

inline void to_json(nlohmann::json& j, const corpus_stats& s) {
    j = nlohmann::json{{"per_language", s.per_language},
                       {"per_source", s.per_source},
                       {"duplicates_removed", s.duplicates_removed},
                       {"parse_failures", s.parse_failures},
                       {"total_retained", s.total_retained()},
                       {"mismatches", s.mismatches}};
}

// ---------------------------------------------------------------------------
// normalization
// ---------------------------------------------------------------------------

namespace detail {

// Keeps emphasis markers only when they pair up; an odd count of '*' or '_'
// strips that marker entirely ("*noun" -> "noun", "**bold**" stays).
inline std::string balance_markdown(std::string text) {
    for (char marker : {'*', '_'}) {
        const auto count = std::count(text.begin(), text.end(), marker);
        if (count % 2 != 0) {
            std::string out;
            out.reserve(text.size());
            for (char c : text)
                if (c != marker) out.push_back(c);
            text = std::move(out);
        }
    }
    return text;
}

inline std::string normalize_text(std::string_view s) {
    return nfc(collapse_whitespace(s));
}

}  // namespace detail

// Strips and collapses whitespace, applies canonical composition, and balances
// markdown emphasis in notes. Idempotent. Throws data_error if the headword or
// every gloss vanishes.
inline dict_entry normalize_entry(dict_entry e) {
    e.headword = detail::normalize_text(e.headword);
    if (e.headword.empty())
        throw data_error("entry '" + e.entry_id + "': headword empty after normalization");
    std::vector<std::string> glosses;
    for (const auto& t : e.translations) {
        auto g = detail::normalize_text(t);
        if (!g.empty()) glosses.push_back(std::move(g));
    }
    if (glosses.empty())
        throw data_error("entry '" + e.entry_id + "': no non-empty gloss after normalization");
    e.translations = std::move(glosses);
    e.part_of_speech = detail::normalize_text(e.part_of_speech);
    e.example = detail::normalize_text(e.example);
    e.notes = detail::balance_markdown(detail::normalize_text(e.notes));
    e.language = trim(e.language);
    return e;
}

// ---------------------------------------------------------------------------
// source parsing
// ---------------------------------------------------------------------------

struct parse_reject {
    int line = 0;  // 1-based line (or block start line for block profiles)
    std::string text;
    std::string reason;
};

struct parse_result {
    std::vector<dict_entry> entries;
    std::vector<parse_reject> rejects;
};

namespace detail {

inline std::vector<std::string> split_glosses(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == ';' || c == ',') {
            auto g = trim(cur);
            if (!g.empty()) out.push_back(std::move(g));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    auto g = trim(cur);
    if (!g.empty()) out.push_back(std::move(g));
    return out;
}

// "headword SEP gloss[, gloss...]" lines; separator is an em/en dash or a
// spaced hyphen, the format the scraped sources come in.
inline void parse_line_profile(std::string_view raw, std::string_view language,
                               std::string_view source_id, parse_result& out) {
    const auto lines = split_lines(raw);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const int lineno = static_cast<int>(i + 1);
        const std::string line = trim(lines[i]);
        if (line.empty() || line.front() == '#') continue;
        std::size_t sep = line.find("—");  // em dash
        std::size_t sep_len = std::string("—").size();
        if (sep == std::string::npos) {
            sep = line.find("–");  // en dash
            sep_len = std::string("–").size();
        }
        if (sep == std::string::npos) {
            sep = line.find(" - ");
            sep_len = 3;
        }
        if (sep == std::string::npos) {
            out.rejects.push_back({lineno, line, "missing separator"});
            continue;
        }
        const std::string head = trim(line.substr(0, sep));
        const std::string tail = trim(line.substr(sep + sep_len));
        if (collapse_whitespace(head).empty()) {
            out.rejects.push_back({lineno, line, "empty headword"});
            continue;
        }
        auto glosses = split_glosses(tail);
        if (glosses.empty()) {
            out.rejects.push_back({lineno, line, "empty gloss"});
            continue;
        }
        dict_entry e;
        e.entry_id = std::string(source_id) + ":" + std::to_string(lineno);
        e.headword = head;
        e.language = std::string(language);
        e.translations = std::move(glosses);
        e.source_id = std::string(source_id);
        out.entries.push_back(std::move(e));
    }
}

// headword \t glosses [\t part_of_speech [\t example [\t notes]]]
inline void parse_tsv_profile(std::string_view raw, std::string_view language,
                              std::string_view source_id, parse_result& out) {
    const auto lines = split_lines(raw);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const int lineno = static_cast<int>(i + 1);
        const std::string& line = lines[i];
        if (trim(line).empty() || line.front() == '#') continue;
        std::vector<std::string> cols;
        std::size_t pos = 0;
        while (true) {
            auto tab = line.find('\t', pos);
            if (tab == std::string::npos) {
                cols.push_back(line.substr(pos));
                break;
            }
            cols.push_back(line.substr(pos, tab - pos));
            pos = tab + 1;
        }
        if (cols.size() < 2) {
            out.rejects.push_back({lineno, line, "expected at least 2 tab-separated columns"});
            continue;
        }
        const std::string head = trim(cols[0]);
        if (head.empty()) {
            out.rejects.push_back({lineno, line, "empty headword"});
            continue;
        }
        auto glosses = split_glosses(cols[1]);
        if (glosses.empty()) {
            out.rejects.push_back({lineno, line, "empty gloss"});
            continue;
        }
        dict_entry e;
        e.entry_id = std::string(source_id) + ":" + std::to_string(lineno);
        e.headword = head;
        e.language = std::string(language);
        e.translations = std::move(glosses);
        e.source_id = std::string(source_id);
        if (cols.size() > 2) e.part_of_speech = trim(cols[2]);
        if (cols.size() > 3) e.example = trim(cols[3]);
        if (cols.size() > 4) e.notes = trim(cols[4]);
        out.entries.push_back(std::move(e));
    }
}

// Blank-line separated "key: value" blocks, the shape OCR extraction yields.
// Recognized keys: headword/word, translation/translations/meaning, pos,
// part_of_speech, example, notes.
inline void parse_kv_profile(std::string_view raw, std::string_view language,
                             std::string_view source_id, parse_result& out) {
    const auto lines = split_lines(raw);
    std::map<std::string, std::string> block;
    int block_start = 0;
    int block_index = 0;

    auto flush = [&](int end_line) {
        if (block.empty()) return;
        ++block_index;
        std::string head = block.count("headword") ? block["headword"]
                          : block.count("word")    ? block["word"]
                                                   : "";
        std::string gloss_text = block.count("translations") ? block["translations"]
                                : block.count("translation") ? block["translation"]
                                : block.count("meaning")     ? block["meaning"]
                                                             : "";
        (void)end_line;
        if (trim(head).empty()) {
            out.rejects.push_back({block_start, "block " + std::to_string(block_index),
                                   "empty headword"});
        } else {
            auto glosses = split_glosses(gloss_text);
            if (glosses.empty()) {
                out.rejects.push_back({block_start, "block " + std::to_string(block_index),
                                       "empty gloss"});
            } else {
                dict_entry e;
                e.entry_id = std::string(source_id) + ":" + std::to_string(block_index);
                e.headword = trim(head);
                e.language = std::string(language);
                e.translations = std::move(glosses);
                e.source_id = std::string(source_id);
                if (block.count("pos")) e.part_of_speech = trim(block["pos"]);
                if (block.count("part_of_speech")) e.part_of_speech = trim(block["part_of_speech"]);
                if (block.count("example")) e.example = trim(block["example"]);
                if (block.count("notes")) e.notes = trim(block["notes"]);
                out.entries.push_back(std::move(e));
            }
        }
        block.clear();
    };

    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string line = trim(lines[i]);
        if (line.empty()) {
            flush(static_cast<int>(i));
            continue;
        }
        if (block.empty()) block_start = static_cast<int>(i + 1);
        auto colon = line.find(':');
        if (colon == std::string::npos) {
            // OCR noise inside a block: tack onto notes rather than dropping
            block["notes"] += (block["notes"].empty() ? "" : " ") + line;
            continue;
        }
        block[lowercase_ascii(trim(line.substr(0, colon)))] = trim(line.substr(colon + 1));
    }
    flush(static_cast<int>(lines.size()));
}

}  // namespace detail

// Parses one raw source into normalized entries plus a rejects list (with line
// numbers) for anything unparseable. Unknown profile names are configuration
// errors; empty input is an empty corpus.
inline parse_result parse_source(std::string_view raw_text, std::string_view profile,
                                 std::string_view language, std::string_view source_id) {
    parse_result out;
    if (profile == "lines") {
        detail::parse_line_profile(raw_text, language, source_id, out);
    } else if (profile == "tsv") {
        detail::parse_tsv_profile(raw_text, language, source_id, out);
    } else if (profile == "kv") {
        detail::parse_kv_profile(raw_text, language, source_id, out);
    } else {
        throw config_error("unknown parser profile '" + std::string(profile) +
                           "' (registered: lines, tsv, kv)");
    }
    // Normalize in place; anything the normalizer refuses joins the rejects.
    std::vector<dict_entry> kept;
    kept.reserve(out.entries.size());
    for (auto& e : out.entries) {
        const std::string id = e.entry_id;
        int lineno = 0;
        if (auto colon = id.rfind(':'); colon != std::string::npos)
            lineno = std::atoi(id.c_str() + colon + 1);
        try {
            kept.push_back(normalize_entry(std::move(e)));
        } catch (const data_error& err) {
            out.rejects.push_back({lineno, id, err.what()});
        }
    }
    out.entries = std::move(kept);
    return out;
}

// ---------------------------------------------------------------------------
// dedupe / validate
// ---------------------------------------------------------------------------

// Removes entries sharing (language, casefolded headword, casefolded first
// gloss); earliest occurrence wins, order otherwise preserved. Same headword
// with a different first gloss is a legitimate polysemous entry and stays.
inline std::pair<std::vector<dict_entry>, corpus_stats> dedupe(std::vector<dict_entry> entries) {
    corpus_stats stats;
    std::set<std::tuple<std::string, std::string, std::string>> seen;
    std::vector<dict_entry> kept;
    kept.reserve(entries.size());
    for (auto& e : entries) {
        const std::string first_gloss = e.translations.empty() ? "" : e.translations.front();
        auto key = std::make_tuple(e.language, case_fold(e.headword), case_fold(first_gloss));
        if (!seen.insert(std::move(key)).second) {
            ++stats.duplicates_removed;
            continue;
        }
        ++stats.per_language[e.language];
        ++stats.per_source[e.source_id];
        kept.push_back(std::move(e));
    }
    return {std::move(kept), std::move(stats)};
}

// Computes per-language counts and, when expected counts are supplied, lists
// mismatches. In strict mode an unknown language code or duplicate entry_id
// throws; otherwise both are recorded as mismatches.
inline corpus_stats validate_corpus(const std::vector<dict_entry>& entries,
                                    const std::optional<std::map<std::string, int>>& expected = {},
                                    bool strict = false,
                                    const std::set<std::string>& languages = default_languages()) {
    corpus_stats stats;
    std::set<std::string> ids;
    for (const auto& e : entries) {
        ++stats.per_language[e.language];
        ++stats.per_source[e.source_id];
        if (!languages.count(e.language)) {
            const std::string msg = "unknown language code '" + e.language + "' (entry " + e.entry_id + ")";
            if (strict) throw data_error(msg);
            stats.mismatches.push_back(msg);
        }
        if (!ids.insert(e.entry_id).second) {
            const std::string msg = "duplicate entry_id '" + e.entry_id + "'";
            if (strict) throw data_error(msg);
            stats.mismatches.push_back(msg);
        }
    }
    if (expected) {
        for (const auto& [lang, want] : *expected) {
            const int got = stats.per_language.count(lang) ? stats.per_language.at(lang) : 0;
            if (got != want)
                stats.mismatches.push_back("language '" + lang + "': expected " +
                                           std::to_string(want) + " entries, found " +
                                           std::to_string(got));
        }
        for (const auto& [lang, got] : stats.per_language)
            if (!expected->count(lang))
                stats.mismatches.push_back("language '" + lang + "': " + std::to_string(got) +
                                           " entries but no expected count");
    }
    return stats;
}

}  // namespace lexitutor
