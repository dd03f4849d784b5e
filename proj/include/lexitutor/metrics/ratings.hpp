#pragma once

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lexitutor/util.hpp"

namespace lexitutor {

// The four-point Likert scale used by the judge rubric.
inline constexpr std::array<int, 4> rating_scale{1, 3, 5, 7};

inline bool on_rating_scale(int r) { return r == 1 || r == 3 || r == 5 || r == 7; }

inline int rating_index(int r) {
    switch (r) {
        case 1: return 0;
        case 3: return 1;
        case 5: return 2;
        case 7: return 3;
        default:
            throw std::invalid_argument("rating " + std::to_string(r) + " not on the 1/3/5/7 scale");
    }
}

// Affine rating -> percent map: pct = 12.5 * (r + 1), so {1,3,5,7} map to
// {25,50,75,100}. Being affine it commutes with averaging, so it accepts mean
// ratings anywhere in [1, 7].
inline double rating_to_percent(double r) {
    if (!(r >= 1.0 && r <= 7.0))
        throw std::invalid_argument("rating " + std::to_string(r) + " outside [1, 7]");
    return 12.5 * (r + 1.0);
}

// ---------------------------------------------------------------------------
// criterion table
// ---------------------------------------------------------------------------

enum class criterion {
    instruction_alignment,
    pedagogical_completeness,
    linguistic_cultural_accuracy,
    coherence_naturalness,
};

inline constexpr std::array<criterion, 4> all_criteria{
    criterion::instruction_alignment,
    criterion::pedagogical_completeness,
    criterion::linguistic_cultural_accuracy,
    criterion::coherence_naturalness,
};

inline std::string_view to_string(criterion c) {
    switch (c) {
        case criterion::instruction_alignment: return "instruction_alignment";
        case criterion::pedagogical_completeness: return "pedagogical_completeness";
        case criterion::linguistic_cultural_accuracy: return "linguistic_cultural_accuracy";
        case criterion::coherence_naturalness: return "coherence_naturalness";
    }
    return "unknown";
}

inline criterion parse_criterion(std::string_view name) {
    for (criterion c : all_criteria)
        if (to_string(c) == name) return c;
    throw data_error("unknown criterion: " + std::string(name));
}

// Group (language or dialogue kind) x criterion matrix of mean ratings and/or
// percentages. A cell may carry either representation; aggregation prefers the
// percentage and falls back to converting the mean rating.
struct criterion_table {
    struct cell {
        std::optional<double> mean_rating;
        std::optional<double> percent;
        int count = 0;
    };
    std::map<std::string, std::array<cell, 4>> rows;

    cell& at(const std::string& group, criterion c) {
        return rows[group][static_cast<std::size_t>(c)];
    }
};

struct criterion_aggregate {
    std::map<std::string, double> per_group;  // mean of the four criterion percentages
    double overall = 0.0;                     // mean of per_group values
};

// Per-group value = arithmetic mean of the four criterion percentages;
// overall = mean over groups. A group missing a criterion is an error naming
// the (group, criterion) pair.
inline criterion_aggregate aggregate_criteria(const criterion_table& table) {
    if (table.rows.empty()) throw data_error("aggregate_criteria: empty table");
    criterion_aggregate agg;
    double total = 0.0;
    for (const auto& [group, cells] : table.rows) {
        double sum = 0.0;
        for (criterion c : all_criteria) {
            const auto& cell = cells[static_cast<std::size_t>(c)];
            if (cell.percent) {
                sum += *cell.percent;
            } else if (cell.mean_rating) {
                sum += rating_to_percent(*cell.mean_rating);
            } else {
                throw data_error("aggregate_criteria: missing criterion '" +
                                 std::string(to_string(c)) + "' for group '" + group + "'");
            }
        }
        const double avg = sum / static_cast<double>(all_criteria.size());
        agg.per_group[group] = avg;
        total += avg;
    }
    agg.overall = total / static_cast<double>(agg.per_group.size());
    return agg;
}

}  // namespace lexitutor
