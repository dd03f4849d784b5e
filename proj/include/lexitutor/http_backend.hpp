#pragma once

#include <cstdlib>
#include <memory>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "lexitutor/backend.hpp"

namespace lexitutor {

// Chat-completion-style HTTP adapter. POSTs
//   {"model": ..., "messages": [{"role":"user","content": prompt}], "seed": ...}
// to the configured endpoint and reads choices[0].message.content. The bearer
// token comes from the environment variable named in the spec, never from
// configuration files.
class http_backend : public text_backend {
public:
    explicit http_backend(backend_spec spec) : spec_(std::move(spec)) {
        spec_.validate();
        const auto scheme_end = spec_.endpoint.find("://");
        if (scheme_end == std::string::npos)
            throw config_error("backend '" + spec_.name + "': endpoint must include a scheme");
        const auto path_start = spec_.endpoint.find('/', scheme_end + 3);
        if (path_start == std::string::npos) {
            base_ = spec_.endpoint;
            path_ = "/";
        } else {
            base_ = spec_.endpoint.substr(0, path_start);
            path_ = spec_.endpoint.substr(path_start);
        }
        client_ = std::make_unique<httplib::Client>(base_);
        const auto secs = std::chrono::duration_cast<std::chrono::seconds>(spec_.timeout);
        client_->set_connection_timeout(secs.count(), 0);
        client_->set_read_timeout(secs.count(), 0);
        client_->set_write_timeout(secs.count(), 0);
        if (!spec_.auth_env.empty()) {
            if (const char* token = std::getenv(spec_.auth_env.c_str()); token && *token)
                client_->set_bearer_token_auth(token);
        }
    }

    std::string_view name() const override { return spec_.name; }

    backend_reply generate(const generation_request& req) override {
        nlohmann::json body{
            {"model", spec_.model},
            {"messages", nlohmann::json::array({{{"role", "user"}, {"content", req.prompt_text}}})},
            {"seed", req.seed},
        };
        backend_reply reply;
        auto res = client_->Post(path_, body.dump(), "application/json");
        if (!res) {
            reply.transport_error = true;
            reply.error = "transport error: " + httplib::to_string(res.error());
            return reply;
        }
        reply.http_status = res->status;
        if (res->status != 200) {
            reply.error = res->body.substr(0, 512);
            return reply;
        }
        try {
            const auto j = nlohmann::json::parse(res->body);
            reply.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            // a 200 with an unreadable body is treated like a flaky transport
            reply.transport_error = true;
            reply.error = std::string("malformed response body: ") + e.what();
        }
        return reply;
    }

private:
    backend_spec spec_;
    std::string base_;
    std::string path_;
    std::unique_ptr<httplib::Client> client_;
};

}  // namespace lexitutor
