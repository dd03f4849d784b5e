#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "lexitutor/dialogue.hpp"
#include "lexitutor/metrics/ratings.hpp"
#include "lexitutor/rng.hpp"
#include "lexitutor/templates.hpp"
#include "lexitutor/util.hpp"

namespace lexitutor {

struct retry_policy {
    int max_attempts = 3;
    std::chrono::milliseconds backoff_base{500};
    std::chrono::milliseconds backoff_cap{8000};
};

struct backend_spec {
    std::string name;
    std::string endpoint;  // e.g. http://host:port/v1/chat/completions
    std::string model;
    std::string auth_env;  // name of the env var holding the bearer token
    int max_concurrency = 4;
    retry_policy retry;
    std::chrono::milliseconds timeout{30000};

    void validate() const {
        if (max_concurrency < 1) throw config_error("backend '" + name + "': max_concurrency must be >= 1");
        if (retry.max_attempts < 1) throw config_error("backend '" + name + "': max_attempts must be >= 1");
    }
};

inline void to_json(nlohmann::json& j, const backend_spec& s) {
    j = nlohmann::json{{"name", s.name},
                       {"endpoint", s.endpoint},
                       {"model", s.model},
                       {"auth_env", s.auth_env},
                       {"max_concurrency", s.max_concurrency},
                       {"max_attempts", s.retry.max_attempts},
                       {"backoff_base_ms", s.retry.backoff_base.count()},
                       {"backoff_cap_ms", s.retry.backoff_cap.count()},
                       {"timeout_ms", s.timeout.count()}};
}

inline void from_json(const nlohmann::json& j, backend_spec& s) {
    s.name = j.value("name", "");
    s.endpoint = j.value("endpoint", "");
    s.model = j.value("model", "");
    s.auth_env = j.value("auth_env", "");
    s.max_concurrency = j.value("max_concurrency", 4);
    s.retry.max_attempts = j.value("max_attempts", 3);
    s.retry.backoff_base = std::chrono::milliseconds(j.value("backoff_base_ms", 500));
    s.retry.backoff_cap = std::chrono::milliseconds(j.value("backoff_cap_ms", 8000));
    s.timeout = std::chrono::milliseconds(j.value("timeout_ms", 30000));
}

// One backend attempt. `text` is meaningful only on http_status == 200 with
// no transport error.
struct backend_reply {
    int http_status = 0;
    bool transport_error = false;
    std::string error;
    std::string text;

    bool retryable() const {
        return transport_error || http_status == 408 || http_status == 429 ||
               (http_status >= 500 && http_status < 600);
    }
    bool ok() const { return !transport_error && http_status == 200; }
};

class text_backend {
public:
    virtual ~text_backend() = default;
    virtual backend_reply generate(const generation_request& request) = 0;
    virtual std::string_view name() const = 0;
};

// ---------------------------------------------------------------------------
// mock backend
// ---------------------------------------------------------------------------

struct mock_options {
    // Deterministically fail every attempt for a hash-selected fraction of
    // request ids (1.0 fails everything -> exhausted_retries).
    double fail_rate = 0.0;
    // Fail the first N attempts of every request with `fail_status`, then
    // succeed (exercises the retry path).
    int fail_first_attempts = 0;
    int fail_status = 429;
    // Artificial latency so concurrency instrumentation has something to see.
    std::chrono::milliseconds latency{0};
};

// Deterministic stand-in for a text-generation service: for any request the
// response depends only on (request_id, seed, target_role), so whole pipeline
// runs are reproducible. SFT requests yield parseable transcripts, DPO
// requests a single tutor reply, judge requests a strict-JSON verdict.
class mock_backend : public text_backend {
public:
    explicit mock_backend(mock_options opts = {}) : opts_(opts) {}

    std::string_view name() const override { return "mock"; }

    backend_reply generate(const generation_request& req) override {
        const int in_flight = ++in_flight_;
        int expected = peak_in_flight_.load();
        while (in_flight > expected &&
               !peak_in_flight_.compare_exchange_weak(expected, in_flight)) {
        }
        ++total_calls_;
        if (opts_.latency.count() > 0) std::this_thread::sleep_for(opts_.latency);

        backend_reply reply;
        const std::uint64_t h = mix_seed(fnv1a(req.request_id), req.seed);
        int attempt;
        {
            std::lock_guard<std::mutex> lock(mutex_);
            attempt = ++attempts_[req.request_id];
        }
        if (opts_.fail_rate > 0.0 &&
            static_cast<double>(h >> 11) * 0x1.0p-53 < opts_.fail_rate) {
            reply.http_status = opts_.fail_status;
            reply.error = "injected permanent fault";
        } else if (attempt <= opts_.fail_first_attempts) {
            reply.http_status = opts_.fail_status;
            reply.error = "injected transient fault";
        } else {
            reply.http_status = 200;
            reply.text = render(req, h);
        }
        --in_flight_;
        return reply;
    }

    int peak_in_flight() const { return peak_in_flight_.load(); }
    long total_calls() const { return total_calls_.load(); }
    void reset_counters() {
        peak_in_flight_ = 0;
        total_calls_ = 0;
        std::lock_guard<std::mutex> lock(mutex_);
        attempts_.clear();
    }

private:
    static std::string pick(split_mix64& rng, const std::vector<std::string>& xs) {
        return xs[rng.bounded(xs.size())];
    }

    std::string render(const generation_request& req, std::uint64_t h) const {
        split_mix64 rng(mix_seed(h, fnv1a(req.target_role)));
        switch (req.cls) {
            case request_class::sft_dialogue: return render_dialogue(req, rng);
            case request_class::dpo_response: return render_response(req, rng);
            case request_class::judge_verdict: return render_verdict(rng);
        }
        return {};
    }

    std::string render_dialogue(const generation_request& req, split_mix64& rng) const {
        static const std::vector<std::string> asks{
            "What does it mean?", "Could you use it in a sentence?",
            "How would I say that to a friend?", "Is my spelling right?",
            "Can you explain that again more simply?", "What is a related word?"};
        static const std::vector<std::string> answers{
            "Good question - it is commonly used in everyday speech.",
            "Certainly: here is a simple example sentence you can reuse.",
            "Nice attempt! One small correction, then it is perfect.",
            "Exactly right. Let us build on that with a harder example.",
            "It carries a friendly, informal tone in most regions.",
            "Remember the stress falls on the first syllable."};
        std::string out;
        const int exchanges = std::max(req.min_learner_turns, 3) + static_cast<int>(rng.bounded(2));
        for (int i = 0; i < exchanges; ++i) {
            out += "[learner] (" + req.request_id + "/" + std::to_string(i + 1) + ") " +
                   pick(rng, asks) + "\n";
            out += "[tutor] " + pick(rng, answers) + "\n";
        }
        return out;
    }

    std::string render_response(const generation_request& req, split_mix64& rng) const {
        static const std::vector<std::string> good{
            "Let me walk you through it step by step, starting from the meaning.",
            "Here is the accurate explanation, with an example and a practice prompt.",
            "First a gentle correction, then the full explanation you asked for."};
        static const std::vector<std::string> weak{
            "It just means what it means.", "Hard to say, it depends.",
            "That word is not really important for beginners."};
        const bool chosen = req.target_role == "chosen-generator";
        return "(" + req.request_id + ") " + pick(rng, chosen ? good : weak);
    }

    std::string render_verdict(split_mix64& rng) const {
        auto score = [&] { return rating_scale[1 + rng.bounded(3)]; };  // 3/5/7
        nlohmann::json j{
            {"instruction_following_rationale", "Follows the requested task and format."},
            {"instruction_alignment_score", score()},
            {"pedagogical_completeness_rationale", "Explains, gives an example, and scaffolds."},
            {"pedagogical_completeness_score", score()},
            {"linguistic_cultural_accuracy_rationale", "Language is accurate with minor slips."},
            {"linguistic_cultural_accuracy_score", score()},
            {"coherence_and_naturalness_rationale", "Organized and encouraging throughout."},
            {"coherence_and_naturalness_score", score()},
        };
        return j.dump();
    }

    mock_options opts_;
    std::atomic<int> in_flight_{0};
    std::atomic<int> peak_in_flight_{0};
    std::atomic<long> total_calls_{0};
    mutable std::mutex mutex_;
    std::map<std::string, int> attempts_;
};

}  // namespace lexitutor
