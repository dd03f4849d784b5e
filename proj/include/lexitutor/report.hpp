#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lexitutor/metrics/ratings.hpp"
#include "lexitutor/util.hpp"

namespace lexitutor {

inline std::string format_fixed(double v, int decimals = 1) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

// Aligned-text table for terminal reports.
class text_table {
public:
    explicit text_table(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

    std::string render() const {
        std::vector<std::size_t> widths(header_.size(), 0);
        auto measure = [&](const std::vector<std::string>& row) {
            for (std::size_t i = 0; i < row.size() && i < widths.size(); ++i)
                widths[i] = std::max(widths[i], row[i].size());
        };
        measure(header_);
        for (const auto& r : rows_) measure(r);

        std::string out;
        auto emit = [&](const std::vector<std::string>& row) {
            for (std::size_t i = 0; i < widths.size(); ++i) {
                const std::string& cell = i < row.size() ? row[i] : std::string{};
                out += cell;
                if (i + 1 < widths.size()) out += std::string(widths[i] - cell.size() + 2, ' ');
            }
            out += "\n";
        };
        emit(header_);
        std::size_t rule = 0;
        for (std::size_t w : widths) rule += w + 2;
        out += std::string(rule > 2 ? rule - 2 : rule, '-') + "\n";
        for (const auto& r : rows_) emit(r);
        return out;
    }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

// ---------------------------------------------------------------------------
// metric score report
// ---------------------------------------------------------------------------

struct metric_row {
    std::string id;
    std::string language;
    double chrf = 0.0;
    double rouge_f1 = 0.0;
    double rouge_precision = 0.0;
    double rouge_recall = 0.0;
};

struct metric_report {
    std::vector<metric_row> rows;

    struct lang_means {
        double chrf = 0.0;
        double rouge_f1 = 0.0;
        int count = 0;
    };

    std::map<std::string, lang_means> per_language() const {
        std::map<std::string, lang_means> means;
        for (const auto& r : rows) {
            auto& m = means[r.language];
            m.chrf += r.chrf;
            m.rouge_f1 += r.rouge_f1;
            ++m.count;
        }
        for (auto& [lang, m] : means) {
            m.chrf /= m.count;
            m.rouge_f1 /= m.count;
        }
        return means;
    }

    nlohmann::json to_json() const {
        nlohmann::json per_lang = nlohmann::json::object();
        double chrf_total = 0.0, rouge_total = 0.0;
        const auto means = per_language();
        for (const auto& [lang, m] : means) {
            per_lang[lang] = {{"chrf_pp", m.chrf}, {"rouge_l_f1", m.rouge_f1}, {"count", m.count}};
            chrf_total += m.chrf;
            rouge_total += m.rouge_f1;
        }
        nlohmann::json rows_json = nlohmann::json::array();
        for (const auto& r : rows)
            rows_json.push_back({{"id", r.id},
                                 {"language", r.language},
                                 {"chrf_pp", r.chrf},
                                 {"rouge_l_f1", r.rouge_f1},
                                 {"rouge_l_precision", r.rouge_precision},
                                 {"rouge_l_recall", r.rouge_recall}});
        nlohmann::json j{{"per_language", per_lang}, {"rows", rows_json}};
        if (!means.empty()) {
            j["average"] = {{"chrf_pp", chrf_total / means.size()},
                            {"rouge_l_f1", rouge_total / means.size()}};
        }
        return j;
    }

    std::string render_text() const {
        text_table table({"language", "n", "chrf_pp", "rouge_l_f1"});
        const auto means = per_language();
        double chrf_total = 0.0, rouge_total = 0.0;
        for (const auto& [lang, m] : means) {
            table.add_row({lang, std::to_string(m.count), format_fixed(m.chrf, 2),
                           format_fixed(m.rouge_f1, 4)});
            chrf_total += m.chrf;
            rouge_total += m.rouge_f1;
        }
        if (!means.empty())
            table.add_row({"Avg", "", format_fixed(chrf_total / means.size(), 2),
                           format_fixed(rouge_total / means.size(), 4)});
        return table.render();
    }
};

// ---------------------------------------------------------------------------
// criterion table rendering
// ---------------------------------------------------------------------------

inline nlohmann::json criterion_table_json(const criterion_table& table) {
    nlohmann::json groups = nlohmann::json::object();
    for (const auto& [group, cells] : table.rows) {
        nlohmann::json row = nlohmann::json::object();
        for (criterion c : all_criteria) {
            const auto& cell = cells[static_cast<std::size_t>(c)];
            nlohmann::json cj = nlohmann::json::object();
            if (cell.mean_rating) cj["mean_rating"] = *cell.mean_rating;
            if (cell.percent) cj["percent"] = *cell.percent;
            cj["count"] = cell.count;
            row[std::string(to_string(c))] = cj;
        }
        groups[group] = row;
    }
    nlohmann::json j{{"groups", groups}};
    try {
        const auto agg = aggregate_criteria(table);
        nlohmann::json per_group = nlohmann::json::object();
        for (const auto& [g, v] : agg.per_group) per_group[g] = v;
        j["per_group_average"] = per_group;
        j["overall_average"] = agg.overall;
    } catch (const data_error&) {
        // leave aggregates out when some cell is missing
    }
    return j;
}

inline criterion_table criterion_table_from_json(const nlohmann::json& j) {
    criterion_table table;
    for (const auto& [group, row] : j.at("groups").items()) {
        for (criterion c : all_criteria) {
            const std::string key{to_string(c)};
            if (!row.contains(key)) continue;
            auto& cell = table.at(group, c);
            const auto& cj = row.at(key);
            if (cj.contains("mean_rating")) cell.mean_rating = cj.at("mean_rating").get<double>();
            if (cj.contains("percent")) cell.percent = cj.at("percent").get<double>();
            cell.count = cj.value("count", 0);
        }
    }
    return table;
}

inline std::string criterion_table_text(const criterion_table& table) {
    text_table out({"group", "instr_align", "pedag_compl", "ling_cult_acc", "coher_natu", "average"});
    for (const auto& [group, cells] : table.rows) {
        std::vector<std::string> row{group};
        double sum = 0.0;
        bool complete = true;
        for (criterion c : all_criteria) {
            const auto& cell = cells[static_cast<std::size_t>(c)];
            double pct = 0.0;
            if (cell.percent)
                pct = *cell.percent;
            else if (cell.mean_rating)
                pct = rating_to_percent(*cell.mean_rating);
            else
                complete = false;
            row.push_back(complete ? format_fixed(pct, 1) : "-");
            sum += pct;
        }
        row.push_back(complete ? format_fixed(sum / 4.0, 1) : "-");
        out.add_row(std::move(row));
    }
    return out.render();
}

// Long-form CSV export: group,criterion,mean_rating,percent,count per line.
inline std::string criterion_table_csv(const criterion_table& table) {
    std::string csv = "group,criterion,mean_rating,percent,count\n";
    for (const auto& [group, cells] : table.rows) {
        for (criterion c : all_criteria) {
            const auto& cell = cells[static_cast<std::size_t>(c)];
            csv += group;
            csv += ",";
            csv += to_string(c);
            csv += ",";
            csv += cell.mean_rating ? format_fixed(*cell.mean_rating, 4) : "";
            csv += ",";
            csv += cell.percent ? format_fixed(*cell.percent, 4) : "";
            csv += "," + std::to_string(cell.count) + "\n";
        }
    }
    return csv;
}

inline void write_text_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot write " + path.string());
    out << content;
    if (!out) throw io_error("write failed for " + path.string());
}

}  // namespace lexitutor
