#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lexitutor/util.hpp"

namespace lexitutor {

struct chrf_config {
    int char_order = 6;   // maximum character n-gram order
    int word_order = 2;   // maximum word n-gram order (2 = chrF++)
    double beta = 2.0;    // recall weight

    void validate() const {
        if (char_order < 1 || word_order < 0 || beta <= 0.0)
            throw config_error("chrf_config: orders must be >= 1 and beta > 0");
    }
};

namespace detail {

using ngram_counts = std::map<std::u32string, int>;

inline ngram_counts char_ngrams(const std::vector<char32_t>& chars, int n) {
    ngram_counts counts;
    if (static_cast<int>(chars.size()) >= n) {
        for (std::size_t i = 0; i + n <= chars.size(); ++i)
            ++counts[std::u32string(chars.begin() + i, chars.begin() + i + n)];
    }
    return counts;
}

inline ngram_counts word_ngrams(const std::vector<std::u32string>& words, int n) {
    ngram_counts counts;
    if (static_cast<int>(words.size()) >= n) {
        for (std::size_t i = 0; i + n <= words.size(); ++i) {
            std::u32string key;
            for (std::size_t k = 0; k < static_cast<std::size_t>(n); ++k) {
                if (k) key.push_back(U'\x1');  // token separator, never in text
                key += words[i + k];
            }
            ++counts[std::move(key)];
        }
    }
    return counts;
}

// Whitespace-split with a single leading or trailing ASCII punctuation
// character detached (trailing wins), as the canonical chrF++ tokenizer does.
// "1999." -> ["1999", "."] but "1999.5" stays whole.
inline std::vector<std::u32string> chrf_word_tokens(std::string_view sent) {
    std::vector<std::u32string> out;
    const auto cps = utf8_decode(sent);
    std::vector<std::u32string> raw;
    std::u32string cur;
    for (char32_t c : cps) {
        if (is_unicode_space(c)) {
            if (!cur.empty()) raw.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) raw.push_back(std::move(cur));

    for (auto& w : raw) {
        if (w.size() == 1) {
            out.push_back(std::move(w));
        } else if (is_ascii_punct(w.back())) {
            out.emplace_back(w.begin(), w.end() - 1);
            out.emplace_back(1, w.back());
        } else if (is_ascii_punct(w.front())) {
            out.emplace_back(1, w.front());
            out.emplace_back(w.begin() + 1, w.end());
        } else {
            out.push_back(std::move(w));
        }
    }
    return out;
}

struct order_stats {
    long hyp = 0;
    long ref = 0;
    long match = 0;
};

inline order_stats match_stats(const ngram_counts& hyp, const ngram_counts& ref) {
    order_stats s;
    for (const auto& [ng, cnt] : hyp) {
        s.hyp += cnt;
        auto it = ref.find(ng);
        if (it != ref.end()) s.match += std::min(cnt, it->second);
    }
    for (const auto& [ng, cnt] : ref) s.ref += cnt;
    return s;
}

inline std::vector<ngram_counts> chrf_extract(std::string_view sent, const chrf_config& cfg) {
    std::vector<ngram_counts> grams;
    grams.reserve(static_cast<std::size_t>(cfg.char_order + cfg.word_order));
    std::vector<char32_t> chars;
    for (char32_t c : utf8_decode(sent))
        if (!is_unicode_space(c)) chars.push_back(c);
    for (int n = 1; n <= cfg.char_order; ++n) grams.push_back(char_ngrams(chars, n));
    if (cfg.word_order > 0) {
        const auto words = chrf_word_tokens(sent);
        for (int n = 1; n <= cfg.word_order; ++n) grams.push_back(word_ngrams(words, n));
    }
    return grams;
}

}  // namespace detail

// chrF++: arithmetic mean of per-order F_beta over character n-gram orders
// 1..char_order (whitespace removed) and word n-gram orders 1..word_order
// (punctuation detached). Orders empty on both sides do not count toward the
// mean. Result is scaled to [0, 100]; identical non-empty inputs give 100.
inline double chrf_pp(std::string_view hypothesis, std::string_view reference,
                      const chrf_config& cfg = {}) {
    cfg.validate();
    const double eps = 1e-16;
    const double factor = cfg.beta * cfg.beta;

    const auto hyp_grams = detail::chrf_extract(hypothesis, cfg);
    const auto ref_grams = detail::chrf_extract(reference, cfg);

    double score = 0.0;
    int effective_order = 0;
    for (std::size_t i = 0; i < hyp_grams.size(); ++i) {
        const auto s = detail::match_stats(hyp_grams[i], ref_grams[i]);
        const double prec = s.hyp > 0 ? static_cast<double>(s.match) / s.hyp : eps;
        const double rec = s.ref > 0 ? static_cast<double>(s.match) / s.ref : eps;
        const double denom = factor * prec + rec;
        if (denom > 0.0) score += (1.0 + factor) * prec * rec / denom;
        if (s.hyp > 0 || s.ref > 0) ++effective_order;
    }
    if (effective_order == 0) return 0.0;
    return 100.0 * score / effective_order;
}

}  // namespace lexitutor
