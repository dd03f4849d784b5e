#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>

#include "lexitutor/metrics/ratings.hpp"

namespace lexitutor {

enum class kappa_weighting { linear, quadratic };

// Weighted Cohen's kappa over the 1/3/5/7 rating scale:
//   kappa = 1 - sum(w_ij * O_ij) / sum(w_ij * E_ij)
// with O the observed proportion table, E the outer product of its marginals,
// and w_ij = |i-j|/(k-1) (linear) or ((i-j)/(k-1))^2 (quadratic) over category
// indices. Perfect agreement gives exactly 1, including the degenerate case
// where both raters only ever use one category.
inline double weighted_kappa(std::span<const int> ratings_a, std::span<const int> ratings_b,
                             kappa_weighting weighting = kappa_weighting::quadratic) {
    if (ratings_a.empty() || ratings_a.size() != ratings_b.size())
        throw std::invalid_argument("weighted_kappa: rating lists must be non-empty and equal length");

    constexpr std::size_t k = rating_scale.size();
    std::array<std::array<double, k>, k> observed{};
    for (std::size_t t = 0; t < ratings_a.size(); ++t) {
        const auto i = static_cast<std::size_t>(rating_index(ratings_a[t]));
        const auto j = static_cast<std::size_t>(rating_index(ratings_b[t]));
        observed[i][j] += 1.0;
    }
    const double n = static_cast<double>(ratings_a.size());
    std::array<double, k> row{}, col{};
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            observed[i][j] /= n;
            row[i] += observed[i][j];
            col[j] += observed[i][j];
        }

    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            const double d = static_cast<double>(i > j ? i - j : j - i) / (k - 1);
            const double w = weighting == kappa_weighting::quadratic ? d * d : d;
            num += w * observed[i][j];
            den += w * row[i] * col[j];
        }
    }
    if (den == 0.0) return 1.0;  // both marginals degenerate at one category
    return 1.0 - num / den;
}

}  // namespace lexitutor
