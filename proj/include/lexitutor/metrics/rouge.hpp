#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "lexitutor/unicode.hpp"
#include "lexitutor/util.hpp"

namespace lexitutor {

struct rouge_scores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

namespace detail {

inline std::size_t lcs_length(const std::vector<std::string>& a,
                              const std::vector<std::string>& b) {
    if (a.empty() || b.empty()) return 0;
    // Two-row DP; inputs are sentence-sized.
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            if (a[i - 1] == b[j - 1])
                cur[j] = prev[j - 1] + 1;
            else
                cur[j] = std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

inline std::vector<std::string> rouge_tokens(std::string_view s) {
    std::vector<std::string> tokens = split_tokens(s);
    for (auto& t : tokens) t = case_fold(t);
    return tokens;
}

}  // namespace detail

// ROUGE-L over casefolded whitespace tokens. P = LCS/|hyp|, R = LCS/|ref|,
// F1 = harmonic mean (0 when both sides contribute nothing).
inline rouge_scores rouge_l(std::string_view hypothesis, std::string_view reference) {
    const auto hyp = detail::rouge_tokens(hypothesis);
    const auto ref = detail::rouge_tokens(reference);
    const auto lcs = detail::lcs_length(hyp, ref);

    rouge_scores s;
    s.precision = hyp.empty() ? 0.0 : static_cast<double>(lcs) / hyp.size();
    s.recall = ref.empty() ? 0.0 : static_cast<double>(lcs) / ref.size();
    const double denom = s.precision + s.recall;
    s.f1 = denom > 0.0 ? 2.0 * s.precision * s.recall / denom : 0.0;
    return s;
}

}  // namespace lexitutor
