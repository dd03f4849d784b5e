#pragma once

#include <atomic>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "lexitutor/backend.hpp"
#include "lexitutor/dialogue.hpp"
#include "lexitutor/templates.hpp"
#include "lexitutor/util.hpp"

namespace lexitutor {

enum class gen_status { ok, parse_failed, backend_failed, exhausted_retries };

inline std::string_view to_string(gen_status s) {
    switch (s) {
        case gen_status::ok: return "ok";
        case gen_status::parse_failed: return "parse_failed";
        case gen_status::backend_failed: return "backend_failed";
        case gen_status::exhausted_retries: return "exhausted_retries";
    }
    return "unknown";
}

inline gen_status parse_gen_status(std::string_view name) {
    if (name == "ok") return gen_status::ok;
    if (name == "parse_failed") return gen_status::parse_failed;
    if (name == "backend_failed") return gen_status::backend_failed;
    if (name == "exhausted_retries") return gen_status::exhausted_retries;
    throw data_error("unknown generation status: " + std::string(name));
}

// The outcome of one request, as persisted to the checkpoint log. The full
// request is embedded so a checkpoint is self-contained for resume and for
// downstream dataset assembly. status == ok <=> parsed payload present.
struct generation_record {
    generation_request request;
    std::string backend;
    std::string raw_response;
    std::optional<nlohmann::json> parsed;  // dialogue JSON, {"text": ...}, or verdict JSON
    gen_status status = gen_status::backend_failed;
    std::string failure_reason;
    int attempts = 0;
    std::string started_at;
    std::string finished_at;

    std::optional<tutor_dialogue> dialogue() const {
        if (!parsed || request.cls != request_class::sft_dialogue) return std::nullopt;
        return parsed->get<tutor_dialogue>();
    }

    std::optional<std::string> response_text() const {
        if (!parsed || request.cls != request_class::dpo_response) return std::nullopt;
        return parsed->at("text").get<std::string>();
    }
};

inline void to_json(nlohmann::json& j, const generation_request& r) {
    j = nlohmann::json{{"request_id", r.request_id},
                       {"entry_id", r.entry_id},
                       {"class", to_string(r.cls)},
                       {"prompt_text", r.prompt_text},
                       {"min_learner_turns", r.min_learner_turns},
                       {"target_role", r.target_role},
                       {"seed", r.seed},
                       {"language", r.language}};
    if (r.cls == request_class::sft_dialogue) j["kind"] = to_string(r.kind);
    if (r.cls == request_class::dpo_response) {
        j["combo"] = to_string(r.combo);
        if (r.negative_type) j["negative_type"] = to_string(*r.negative_type);
        j["pair_id"] = r.pair_id;
        j["query_text"] = r.query_text;
    }
    if (r.cls == request_class::judge_verdict) j["query_text"] = r.query_text;
}

inline void from_json(const nlohmann::json& j, generation_request& r) {
    j.at("request_id").get_to(r.request_id);
    r.entry_id = j.value("entry_id", "");
    r.cls = parse_request_class(j.at("class").get<std::string>());
    r.prompt_text = j.value("prompt_text", "");
    r.min_learner_turns = j.value("min_learner_turns", 3);
    r.target_role = j.value("target_role", "");
    r.seed = j.value("seed", std::uint64_t{0});
    r.language = j.value("language", "");
    if (j.contains("kind")) r.kind = parse_dialogue_kind(j.at("kind").get<std::string>());
    if (j.contains("combo")) r.combo = parse_pair_quality_combo(j.at("combo").get<std::string>());
    if (j.contains("negative_type"))
        r.negative_type = parse_negative_query_type(j.at("negative_type").get<std::string>());
    r.pair_id = j.value("pair_id", "");
    r.query_text = j.value("query_text", "");
}

inline void to_json(nlohmann::json& j, const generation_record& rec) {
    j = nlohmann::json{{"request", rec.request},
                       {"backend", rec.backend},
                       {"status", to_string(rec.status)},
                       {"attempts", rec.attempts},
                       {"raw_response", rec.raw_response},
                       {"started_at", rec.started_at},
                       {"finished_at", rec.finished_at}};
    if (rec.parsed) j["parsed"] = *rec.parsed;
    if (!rec.failure_reason.empty()) j["failure_reason"] = rec.failure_reason;
}

inline void from_json(const nlohmann::json& j, generation_record& rec) {
    j.at("request").get_to(rec.request);
    rec.backend = j.value("backend", "");
    rec.status = parse_gen_status(j.at("status").get<std::string>());
    rec.attempts = j.value("attempts", 0);
    rec.raw_response = j.value("raw_response", "");
    rec.started_at = j.value("started_at", "");
    rec.finished_at = j.value("finished_at", "");
    if (j.contains("parsed")) rec.parsed = j.at("parsed");
    if (j.contains("failure_reason")) rec.failure_reason = j.at("failure_reason");
    if ((rec.status == gen_status::ok) != rec.parsed.has_value())
        throw data_error("record '" + rec.request.request_id +
                         "': status/parsed payload disagree");
}

// ---------------------------------------------------------------------------
// checkpoint log
// ---------------------------------------------------------------------------

// Append-only JSON-lines record log keyed by request_id. A syntactically
// broken line is a hard error: silently restarting a half-written run would
// defeat the at-most-once contract.
inline std::map<std::string, generation_record> load_checkpoint(const std::filesystem::path& path) {
    std::map<std::string, generation_record> by_id;
    std::ifstream in(path, std::ios::binary);
    if (!in) return by_id;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim_view(line).empty()) continue;
        try {
            generation_record rec = nlohmann::json::parse(line).get<generation_record>();
            by_id[rec.request.request_id] = std::move(rec);
        } catch (const std::exception& e) {
            throw io_error("corrupted checkpoint " + path.string() + " at line " +
                           std::to_string(lineno) + ": " + e.what());
        }
    }
    return by_id;
}

namespace detail {

inline std::string iso8601_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace detail

// Validates a raw response for its request class and fills record.parsed.
// Returning a non-empty reason marks the attempt as a parse failure (which is
// retried up to the policy, like a transient backend fault).
using response_validator =
    std::function<std::string(const generation_request&, const std::string&, generation_record&)>;

inline std::string default_validator(const generation_request& req, const std::string& raw,
                                     generation_record& rec) {
    switch (req.cls) {
        case request_class::sft_dialogue: {
            try {
                tutor_dialogue d = parse_dialogue(raw, req.min_learner_turns);
                d.dialogue_id = req.request_id;
                d.language = req.language;
                d.kind = req.kind;
                d.entry_id = req.entry_id;
                rec.parsed = d;
                return {};
            } catch (const dialogue_error& e) {
                return e.reason;
            }
        }
        case request_class::dpo_response: {
            if (trim_view(raw).empty()) return "empty_response";
            rec.parsed = nlohmann::json{{"text", trim(raw)}};
            return {};
        }
        case request_class::judge_verdict: {
            // the judge harness installs its own verdict validator; accept
            // anything non-empty here
            if (trim_view(raw).empty()) return "empty_response";
            rec.parsed = nlohmann::json{{"text", trim(raw)}};
            return {};
        }
    }
    return "unknown_request_class";
}

struct run_options {
    response_validator validator = default_validator;
    // Injectable so tests can run retry storms without real sleeping.
    std::function<void(std::chrono::milliseconds)> sleeper =
        [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
};

// Executes a batch against a backend with bounded concurrency, per-request
// retries with exponential backoff, and incremental checkpointing.
//
// Contracts: at-most-once successful generation per request_id across
// run/resume sequences (any checkpointed record is reused, never re-sent);
// one record per request regardless of failures; in-flight requests never
// exceed spec.max_concurrency.
inline std::vector<generation_record> run_batch(const std::vector<generation_request>& requests,
                                                text_backend& backend, const backend_spec& spec,
                                                const std::filesystem::path& checkpoint_path,
                                                const run_options& options = {}) {
    spec.validate();
    auto done = load_checkpoint(checkpoint_path);

    std::vector<generation_record> results(requests.size());
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < requests.size(); ++i) {
        auto it = done.find(requests[i].request_id);
        if (it != done.end()) {
            results[i] = it->second;
        } else {
            pending.push_back(i);
        }
    }
    if (pending.empty()) return results;

    std::ofstream log(checkpoint_path, std::ios::binary | std::ios::app);
    if (!log) throw io_error("checkpoint path not writable: " + checkpoint_path.string());

    std::mutex log_mutex;
    std::atomic<std::size_t> cursor{0};

    auto execute_one = [&](std::size_t idx) {
        const generation_request& req = requests[idx];
        generation_record rec;
        rec.request = req;
        rec.backend = std::string(backend.name());
        rec.started_at = detail::iso8601_now();

        try {
            for (int attempt = 1; attempt <= spec.retry.max_attempts; ++attempt) {
                rec.attempts = attempt;
                backend_reply reply = backend.generate(req);
                if (reply.ok()) {
                    rec.raw_response = reply.text;
                    const std::string reason = options.validator(req, reply.text, rec);
                    if (reason.empty()) {
                        rec.status = gen_status::ok;
                        rec.failure_reason.clear();
                        break;
                    }
                    rec.parsed.reset();
                    rec.status = gen_status::parse_failed;
                    rec.failure_reason = reason;
                } else if (reply.retryable()) {
                    rec.status = gen_status::exhausted_retries;
                    rec.failure_reason = "status " + std::to_string(reply.http_status) +
                                         (reply.error.empty() ? "" : ": " + reply.error);
                } else {
                    rec.status = gen_status::backend_failed;
                    rec.failure_reason = "status " + std::to_string(reply.http_status) +
                                         (reply.error.empty() ? "" : ": " + reply.error);
                    break;  // non-retryable 4xx: fail fast
                }
                if (attempt < spec.retry.max_attempts) {
                    auto delay = spec.retry.backoff_base * (1LL << (attempt - 1));
                    if (delay > spec.retry.backoff_cap) delay = spec.retry.backoff_cap;
                    if (delay.count() > 0) options.sleeper(delay);
                }
            }
        } catch (const std::exception& e) {
            rec.parsed.reset();
            rec.status = gen_status::backend_failed;
            rec.failure_reason = std::string("internal: ") + e.what();
        }
        rec.finished_at = detail::iso8601_now();
        {
            std::lock_guard<std::mutex> lock(log_mutex);
            log << nlohmann::json(rec).dump() << "\n";
            log.flush();
        }
        results[idx] = std::move(rec);
    };

    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(spec.max_concurrency), pending.size());
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&] {
            while (true) {
                const std::size_t k = cursor.fetch_add(1);
                if (k >= pending.size()) return;
                execute_one(pending[k]);
            }
        });
    }
    for (auto& t : threads) t.join();
    return results;
}

}  // namespace lexitutor
