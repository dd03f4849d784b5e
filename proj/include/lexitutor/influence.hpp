#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lexitutor/util.hpp"

namespace lexitutor {

// Per-sample flattened loss-gradient vector, exported by the training stack.
// This repo consumes gradients; it never computes them.
struct gradient_record {
    std::string sample_id;
    std::string split;  // "train" | "validation"
    std::vector<float> vector;
};

struct gradient_file {
    std::int64_t dimension = 0;
    std::string gradient_source;  // free-form provenance from the exporter
    std::string precision = "f32";
    std::vector<gradient_record> records;
};

// ---------------------------------------------------------------------------
// file formats
// ---------------------------------------------------------------------------
// Binary: one JSON header line {"dimension", "count", "gradient_source",
// "precision", "split"?} followed by rows of (uint32 LE id length, id bytes,
// dimension x f32 LE). JSONL fallback: {"sample_id", "split", "vector"} per
// line. read_gradients sniffs the header to tell them apart.

namespace detail {

inline void check_finite(const gradient_record& r) {
    for (float x : r.vector)
        if (!std::isfinite(x))
            throw data_error("gradient '" + r.sample_id + "' contains a non-finite entry");
}

}  // namespace detail

inline void write_gradients_binary(const gradient_file& file, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot write " + path.string());
    nlohmann::json header{{"dimension", file.dimension},
                          {"count", file.records.size()},
                          {"gradient_source", file.gradient_source},
                          {"precision", "f32"}};
    out << header.dump() << "\n";
    for (const auto& rec : file.records) {
        if (static_cast<std::int64_t>(rec.vector.size()) != file.dimension)
            throw data_error("gradient '" + rec.sample_id + "' has dimension " +
                             std::to_string(rec.vector.size()) + ", file header says " +
                             std::to_string(file.dimension));
        const auto id_len = static_cast<std::uint32_t>(rec.sample_id.size());
        char len_bytes[4];
        std::memcpy(len_bytes, &id_len, 4);
        out.write(len_bytes, 4);
        out.write(rec.sample_id.data(), static_cast<std::streamsize>(rec.sample_id.size()));
        out.write(reinterpret_cast<const char*>(rec.vector.data()),
                  static_cast<std::streamsize>(rec.vector.size() * sizeof(float)));
    }
    if (!out) throw io_error("write failed for " + path.string());
}

inline void write_gradients_jsonl(const gradient_file& file, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot write " + path.string());
    for (const auto& rec : file.records) {
        nlohmann::json j{{"sample_id", rec.sample_id}, {"split", rec.split}, {"vector", rec.vector}};
        out << j.dump() << "\n";
    }
    if (!out) throw io_error("write failed for " + path.string());
}

// `default_split` labels rows from files that do not carry a split themselves
// (the binary header may, JSONL rows always do).
inline gradient_file read_gradients(const std::filesystem::path& path,
                                    const std::string& default_split = "train") {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot read " + path.string());
    std::string first_line;
    if (!std::getline(in, first_line)) throw data_error(path.string() + ": empty gradient file");

    nlohmann::json head;
    try {
        head = nlohmann::json::parse(first_line);
    } catch (const nlohmann::json::exception& e) {
        throw data_error(path.string() + ": first line is not JSON: " + e.what());
    }

    gradient_file file;
    if (head.contains("dimension") && head.contains("count")) {
        // binary layout
        file.dimension = head.at("dimension").get<std::int64_t>();
        file.gradient_source = head.value("gradient_source", "");
        file.precision = head.value("precision", "f32");
        const auto count = head.at("count").get<std::int64_t>();
        const std::string split = head.value("split", default_split);
        if (file.dimension <= 0) throw data_error(path.string() + ": non-positive dimension");
        for (std::int64_t i = 0; i < count; ++i) {
            char len_bytes[4];
            if (!in.read(len_bytes, 4))
                throw data_error(path.string() + ": truncated at row " + std::to_string(i));
            std::uint32_t id_len = 0;
            std::memcpy(&id_len, len_bytes, 4);
            gradient_record rec;
            rec.sample_id.resize(id_len);
            rec.split = split;
            if (!in.read(rec.sample_id.data(), id_len))
                throw data_error(path.string() + ": truncated id at row " + std::to_string(i));
            rec.vector.resize(static_cast<std::size_t>(file.dimension));
            if (!in.read(reinterpret_cast<char*>(rec.vector.data()),
                         static_cast<std::streamsize>(rec.vector.size() * sizeof(float))))
                throw data_error(path.string() + ": truncated vector at row " + std::to_string(i));
            detail::check_finite(rec);
            file.records.push_back(std::move(rec));
        }
    } else if (head.contains("sample_id")) {
        // JSONL fallback; first_line is already row one
        in.seekg(0);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (trim_view(line).empty()) continue;
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(line);
            } catch (const nlohmann::json::exception& e) {
                throw data_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
            }
            gradient_record rec;
            rec.sample_id = j.at("sample_id").get<std::string>();
            rec.split = j.value("split", default_split);
            rec.vector = j.at("vector").get<std::vector<float>>();
            detail::check_finite(rec);
            if (file.dimension == 0)
                file.dimension = static_cast<std::int64_t>(rec.vector.size());
            else if (static_cast<std::int64_t>(rec.vector.size()) != file.dimension)
                throw data_error(path.string() + ":" + std::to_string(lineno) +
                                 ": dimension mismatch");
            file.records.push_back(std::move(rec));
        }
    } else {
        throw data_error(path.string() + ": unrecognized gradient file header");
    }
    return file;
}

// ---------------------------------------------------------------------------
// scores
// ---------------------------------------------------------------------------

// TracIn-style influence of a training sample on a validation sample: the
// inner product of their loss gradients. Positive means the training sample
// pushes the validation loss down. Accumulates in double regardless of the
// stored precision.
inline double influence(const gradient_record& train_grad, const gradient_record& val_grad) {
    if (train_grad.vector.size() != val_grad.vector.size())
        throw std::invalid_argument("influence: dimension mismatch (" +
                                    std::to_string(train_grad.vector.size()) + " vs " +
                                    std::to_string(val_grad.vector.size()) + ")");
    detail::check_finite(train_grad);
    detail::check_finite(val_grad);
    double sum = 0.0;
    for (std::size_t k = 0; k < train_grad.vector.size(); ++k)
        sum += static_cast<double>(train_grad.vector[k]) * static_cast<double>(val_grad.vector[k]);
    return sum;
}

struct influence_report_row {
    std::string sample_id;
    double mean_influence = 0.0;
    int rank = 0;     // 1..n, best first
    bool keep = false;
};

// Mean influence of every training sample over the validation set. The inner
// loop runs against the precomputed mean validation gradient, which equals the
// naive (1/|V|) sum of per-pair dot products by bilinearity.
inline std::vector<influence_report_row> mean_influence(
    const std::vector<gradient_record>& train_grads,
    const std::vector<gradient_record>& val_grads) {
    if (val_grads.empty()) throw data_error("mean_influence: empty validation set");
    const std::size_t dim = val_grads.front().vector.size();
    std::vector<double> mean_val(dim, 0.0);
    for (const auto& v : val_grads) {
        if (v.vector.size() != dim) throw std::invalid_argument("mean_influence: dimension mismatch");
        detail::check_finite(v);
        for (std::size_t k = 0; k < dim; ++k) mean_val[k] += static_cast<double>(v.vector[k]);
    }
    for (auto& x : mean_val) x /= static_cast<double>(val_grads.size());

    std::vector<influence_report_row> rows;
    rows.reserve(train_grads.size());
    for (const auto& t : train_grads) {
        if (t.vector.size() != dim) throw std::invalid_argument("mean_influence: dimension mismatch");
        detail::check_finite(t);
        double sum = 0.0;
        for (std::size_t k = 0; k < dim; ++k)
            sum += static_cast<double>(t.vector[k]) * mean_val[k];
        rows.push_back({t.sample_id, sum, 0, false});
    }
    return rows;
}

// Ranks rows best-first (ties broken by ascending sample_id) and keeps the top
// ceil(fraction * n). Deterministic and invariant to input order.
inline std::vector<std::string> filter_top(std::vector<influence_report_row>& rows,
                                           double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw std::invalid_argument("filter_top: fraction must be in (0, 1]");
    std::sort(rows.begin(), rows.end(),
              [](const influence_report_row& a, const influence_report_row& b) {
                  if (a.mean_influence != b.mean_influence)
                      return a.mean_influence > b.mean_influence;
                  return a.sample_id < b.sample_id;
              });
    const auto keep_count = static_cast<std::size_t>(
        std::ceil(fraction * static_cast<double>(rows.size())));
    std::vector<std::string> kept;
    kept.reserve(keep_count);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].rank = static_cast<int>(i + 1);
        rows[i].keep = i < keep_count;
        if (rows[i].keep) kept.push_back(rows[i].sample_id);
    }
    return kept;
}

}  // namespace lexitutor
