#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include <nlohmann/json.hpp>

#include "lexitutor/util.hpp"

#ifndef LEXITUTOR_TEST_DATA_DIR
#define LEXITUTOR_TEST_DATA_DIR "tests/data"
#endif
#ifndef LEXITUTOR_DATA_DIR
#define LEXITUTOR_DATA_DIR "data"
#endif

namespace testutil {

inline std::filesystem::path test_data_dir() { return LEXITUTOR_TEST_DATA_DIR; }
inline std::filesystem::path shipped_data_dir() { return LEXITUTOR_DATA_DIR; }

inline nlohmann::json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw lexitutor::io_error("test fixture missing: " + path.string());
    nlohmann::json j;
    in >> j;
    return j;
}

// Unique scratch directory per test run, cleaned up on destruction.
class temp_dir {
public:
    temp_dir() {
        auto base = std::filesystem::temp_directory_path();
        std::random_device rd;
        path_ = base / ("lexitutor-test-" + std::to_string(rd()) + "-" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~temp_dir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

// Plain Levenshtein distance over code points; the independent oracle for the
// misspelling perturbation bound.
inline int levenshtein(std::string_view a_utf8, std::string_view b_utf8) {
    const auto a = lexitutor::utf8_decode(a_utf8);
    const auto b = lexitutor::utf8_decode(b_utf8);
    std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = static_cast<int>(i);
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

}  // namespace testutil
