#pragma once

#include "dicta/chatml.hpp"
#include "dicta/util.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace dicta {

struct client_params {
    std::string model;
    double      temperature = 0.0;
    int         max_tokens  = 2048;
};

// Abstract chat-completions call: messages in, text out.
struct model_client {
    virtual ~model_client() = default;

    virtual std::string name() const = 0;
    virtual std::string complete(const std::vector<message> & messages) = 0;
};

// Cache key over (client name, canonical request messages).
uint64_t prompt_hash(const std::string & client_name, const std::vector<message> & messages);

// Deterministic in-process client for tests and fixtures.
struct mock_client : model_client {
    std::string name_;
    std::function<std::string(const std::vector<message> &)> fn;

    mock_client(std::string name, std::function<std::string(const std::vector<message> &)> fn_)
        : name_(std::move(name)), fn(std::move(fn_)) {}

    std::string name() const override { return name_; }
    std::string complete(const std::vector<message> & messages) override { return fn(messages); }
};

// Append-only transcript: one JSONL record {client, key, response} per call.
struct transcript {
    std::map<std::pair<std::string, uint64_t>, std::string> entries;

    static transcript load(const std::string & path);
    void save(const std::string & path) const;
};

// Wraps an inner client, recording every response; repeated identical
// requests replay the recorded response instead of re-querying.
struct recording_client : model_client {
    std::shared_ptr<model_client> inner;
    transcript * log;

    recording_client(std::shared_ptr<model_client> inner_, transcript * log_)
        : inner(std::move(inner_)), log(log_) {}

    std::string name() const override { return inner->name(); }
    std::string complete(const std::vector<message> & messages) override;
};

// Serves responses from a recorded transcript only; a miss is a hard error.
struct replay_client : model_client {
    std::string name_;
    const transcript * log;

    replay_client(std::string name, const transcript * log_) : name_(std::move(name)), log(log_) {}

    std::string name() const override { return name_; }
    std::string complete(const std::vector<message> & messages) override;
};

// OpenAI-style chat-completions endpoint over HTTP. Auth token read from the
// named environment variable at call time.
struct http_client : model_client {
    std::string endpoint;      // e.g. http://host:port/v1/chat/completions
    std::string auth_env_var;  // name of env var holding the bearer token
    client_params params;

    http_client(std::string endpoint_, std::string auth_env_var_, client_params params_ = {})
        : endpoint(std::move(endpoint_)), auth_env_var(std::move(auth_env_var_)), params(std::move(params_)) {}

    std::string name() const override { return params.model.empty() ? endpoint : params.model; }
    std::string complete(const std::vector<message> & messages) override;
};

} // namespace dicta
