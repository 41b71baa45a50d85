#include "dicta/client.hpp"

#define CPPHTTPLIB_NO_EXCEPTIONS 0
#include <httplib.h>

#include <cstdlib>
#include <fstream>

namespace dicta {

using json = nlohmann::json;

uint64_t prompt_hash(const std::string & client_name, const std::vector<message> & messages) {
    json arr = json::array();
    for (const auto & m : messages) {
        json jm = {{"role", role_name(m.msg_role)}, {"content", m.content}};
        if (m.reasoning) {
            jm["reasoning"] = *m.reasoning;
        }
        if (!m.tool_calls.empty()) {
            jm["tool_calls"] = m.tool_calls;
        }
        arr.push_back(std::move(jm));
    }
    uint64_t h = fnv1a(client_name);
    return fnv1a(arr.dump(), h);
}

transcript transcript::load(const std::string & path) {
    transcript t;
    std::ifstream in(path);
    if (!in) {
        return t;  // missing file = empty transcript
    }
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) {
            continue;
        }
        json j = json::parse(line);
        t.entries[{j.at("client").get<std::string>(), j.at("key").get<uint64_t>()}] =
            j.at("response").get<std::string>();
    }
    return t;
}

void transcript::save(const std::string & path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write transcript: " + path);
    }
    for (const auto & [key, response] : entries) {
        json j = {{"client", key.first}, {"key", key.second}, {"response", response}};
        out << j.dump() << '\n';
    }
}

std::string recording_client::complete(const std::vector<message> & messages) {
    uint64_t key = prompt_hash(name(), messages);
    auto it = log->entries.find({name(), key});
    if (it != log->entries.end()) {
        return it->second;
    }
    std::string response = inner->complete(messages);
    log->entries[{name(), key}] = response;
    return response;
}

std::string replay_client::complete(const std::vector<message> & messages) {
    uint64_t key = prompt_hash(name_, messages);
    auto it = log->entries.find({name_, key});
    if (it == log->entries.end()) {
        throw client_error("transcript miss for client " + name_ + " key " + std::to_string(key),
                           /*retryable=*/false);
    }
    return it->second;
}

std::string http_client::complete(const std::vector<message> & messages) {
    // split endpoint into scheme://host[:port] and path
    size_t scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos) {
        throw client_error("bad endpoint url: " + endpoint, false);
    }
    size_t path_start = endpoint.find('/', scheme_end + 3);
    std::string base = path_start == std::string::npos ? endpoint : endpoint.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/v1/chat/completions" : endpoint.substr(path_start);

    json body = {
        {"model", params.model},
        {"temperature", params.temperature},
        {"max_tokens", params.max_tokens},
    };
    json msgs = json::array();
    for (const auto & m : messages) {
        msgs.push_back({{"role", role_name(m.msg_role)}, {"content", m.content}});
    }
    body["messages"] = std::move(msgs);

    httplib::Headers headers;
    if (!auth_env_var.empty()) {
        if (const char * tok = std::getenv(auth_env_var.c_str())) {
            headers.emplace("Authorization", std::string("Bearer ") + tok);
        }
    }

    httplib::Client cli(base);
    cli.set_read_timeout(120, 0);
    auto res = cli.Post(path, headers, body.dump(), "application/json");
    if (!res) {
        throw client_error("request to " + endpoint + " failed: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw client_error("request to " + endpoint + " returned status " + std::to_string(res->status),
                           res->status >= 500);
    }
    json reply = json::parse(res->body);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
}

} // namespace dicta
