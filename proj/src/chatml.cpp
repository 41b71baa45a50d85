#include "dicta/chatml.hpp"

#include "dicta/util.hpp"

#include <algorithm>

namespace dicta {

using json = nlohmann::json;

static constexpr std::string_view IM_START       = "<|im_start|>";
static constexpr std::string_view IM_END         = "<|im_end|>";
static constexpr std::string_view THINK_OPEN     = "<think>\n";
static constexpr std::string_view THINK_CLOSE    = "\n</think>\n\n";
static constexpr std::string_view TOOL_CALL_OPEN  = "\n<tool_call>\n";
static constexpr std::string_view TOOL_CALL_CLOSE = "\n</tool_call>";
static constexpr std::string_view TOOL_RESP_OPEN  = "<tool_response>\n";
static constexpr std::string_view TOOL_RESP_CLOSE = "\n</tool_response>";

std::string role_name(role r) {
    switch (r) {
        case role::system:    return "system";
        case role::user:      return "user";
        case role::assistant: return "assistant";
        case role::tool:      return "tool";
    }
    throw std::logic_error("bad role");
}

role role_from_name(std::string_view name) {
    if (name == "system")    return role::system;
    if (name == "user")      return role::user;
    if (name == "assistant") return role::assistant;
    if (name == "tool")      return role::tool;
    throw std::runtime_error("unknown role: " + std::string(name));
}

std::string language_name(language l) {
    switch (l) {
        case language::he:    return "he";
        case language::en:    return "en";
        case language::mixed: return "mixed";
    }
    throw std::logic_error("bad language");
}

language language_from_name(std::string_view name) {
    if (name == "he")    return language::he;
    if (name == "en")    return language::en;
    if (name == "mixed") return language::mixed;
    throw std::runtime_error("unknown language: " + std::string(name));
}

bool contains_reserved_token(std::string_view text) {
    for (auto tok : RESERVED_TOKENS) {
        if (text.find(tok) != std::string_view::npos) {
            return true;
        }
    }
    return false;
}

std::string canonical_json(const json & j) {
    // nlohmann::json keeps object keys sorted; compact dump is canonical
    return j.dump();
}

void conversation::validate() const {
    for (size_t i = 0; i < messages.size(); i++) {
        const auto & m = messages[i];
        if (m.msg_role != role::assistant && (m.reasoning.has_value() || !m.tool_calls.empty())) {
            throw std::runtime_error("message " + std::to_string(i) + ": reasoning/tool_calls on non-assistant role");
        }
        if (contains_reserved_token(m.content)) {
            throw std::runtime_error("message " + std::to_string(i) + ": reserved token in content");
        }
        if (m.reasoning && contains_reserved_token(*m.reasoning)) {
            throw std::runtime_error("message " + std::to_string(i) + ": reserved token in reasoning");
        }
    }
    if (!messages.empty()) {
        role first = messages[0].msg_role;
        if (first != role::system && first != role::user) {
            throw std::runtime_error("first message must be system or user");
        }
    }
    bool after_tool_calls = false;
    for (size_t i = 0; i < messages.size(); i++) {
        const auto & m = messages[i];
        if (m.msg_role == role::tool) {
            if (!after_tool_calls) {
                throw std::runtime_error("message " + std::to_string(i) + ": tool message without a preceding assistant tool call");
            }
        } else {
            after_tool_calls = m.msg_role == role::assistant && !m.tool_calls.empty();
        }
    }
}

std::string render(const conversation & conv) {
    conv.validate();
    std::string out;
    for (const auto & m : conv.messages) {
        if (m.reasoning && conv.mode == chat_mode::instruct) {
            throw std::runtime_error("reasoning present in instruct mode");
        }
        out += IM_START;
        out += role_name(m.msg_role);
        out += '\n';
        switch (m.msg_role) {
            case role::system:
            case role::user:
                out += m.content;
                break;
            case role::tool:
                out += TOOL_RESP_OPEN;
                out += m.content;
                out += TOOL_RESP_CLOSE;
                break;
            case role::assistant: {
                if (m.reasoning) {
                    out += THINK_OPEN;
                    out += *m.reasoning;
                    out += THINK_CLOSE;
                }
                out += m.content;
                for (const auto & call : m.tool_calls) {
                    std::string payload = canonical_json(call);
                    if (contains_reserved_token(payload)) {
                        throw std::runtime_error("reserved token in tool-call payload");
                    }
                    out += TOOL_CALL_OPEN;
                    out += payload;
                    out += TOOL_CALL_CLOSE;
                }
                break;
            }
        }
        out += IM_END;
        out += '\n';
    }
    return out;
}

static message parse_assistant_body(std::string_view body, size_t base) {
    message m;
    m.msg_role = role::assistant;
    size_t pos = 0;
    if (starts_with(body, THINK_OPEN)) {
        size_t close = body.find(THINK_CLOSE, THINK_OPEN.size());
        if (close == std::string_view::npos) {
            throw parse_error("unbalanced <think> block", base);
        }
        m.reasoning = std::string(body.substr(THINK_OPEN.size(), close - THINK_OPEN.size()));
        pos = close + THINK_CLOSE.size();
    }
    std::string_view rest = body.substr(pos);
    size_t call_pos = rest.find("<tool_call>");
    if (call_pos == std::string_view::npos) {
        m.content = std::string(rest);
    } else {
        if (call_pos == 0 || rest[call_pos - 1] != '\n') {
            throw parse_error("tool call block not preceded by newline", base + pos + call_pos);
        }
        m.content = std::string(rest.substr(0, call_pos - 1));
        size_t p = call_pos - 1;
        while (p < rest.size()) {
            if (rest.substr(p, TOOL_CALL_OPEN.size()) != TOOL_CALL_OPEN) {
                throw parse_error("trailing garbage after tool call", base + pos + p);
            }
            p += TOOL_CALL_OPEN.size();
            size_t close = rest.find(TOOL_CALL_CLOSE, p);
            if (close == std::string_view::npos) {
                throw parse_error("unbalanced <tool_call> block", base + pos + p);
            }
            std::string payload(rest.substr(p, close - p));
            try {
                m.tool_calls.push_back(json::parse(payload));
            } catch (const json::parse_error & e) {
                throw parse_error(std::string("malformed tool-call payload: ") + e.what(), base + pos + p);
            }
            p = close + TOOL_CALL_CLOSE.size();
        }
    }
    if (contains_reserved_token(m.content) || (m.reasoning && contains_reserved_token(*m.reasoning))) {
        throw parse_error("interleaved or stray delimiter in message body", base);
    }
    return m;
}

conversation parse(std::string_view text) {
    conversation conv;
    size_t pos = 0;
    while (pos < text.size()) {
        if (text.substr(pos, IM_START.size()) != IM_START) {
            throw parse_error("expected <|im_start|>", pos);
        }
        pos += IM_START.size();
        size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) {
            throw parse_error("missing newline after role", pos);
        }
        role r = role_from_name(text.substr(pos, nl - pos));
        size_t body_start = nl + 1;
        size_t end = text.find(IM_END, body_start);
        if (end == std::string_view::npos) {
            throw parse_error("missing <|im_end|>", body_start);
        }
        std::string_view body = text.substr(body_start, end - body_start);
        pos = end + IM_END.size();
        if (pos >= text.size() || text[pos] != '\n') {
            throw parse_error("missing newline after <|im_end|>", pos);
        }
        pos++;

        message m;
        switch (r) {
            case role::system:
            case role::user:
                m.msg_role = r;
                m.content = std::string(body);
                if (contains_reserved_token(m.content)) {
                    throw parse_error("stray delimiter in message body", body_start);
                }
                break;
            case role::tool: {
                m.msg_role = r;
                if (!starts_with(body, TOOL_RESP_OPEN) || !ends_with(body, TOOL_RESP_CLOSE) ||
                    body.size() < TOOL_RESP_OPEN.size() + TOOL_RESP_CLOSE.size()) {
                    throw parse_error("tool message not wrapped in <tool_response>", body_start);
                }
                m.content = std::string(body.substr(TOOL_RESP_OPEN.size(),
                    body.size() - TOOL_RESP_OPEN.size() - TOOL_RESP_CLOSE.size()));
                if (contains_reserved_token(m.content)) {
                    throw parse_error("stray delimiter in tool response", body_start);
                }
                break;
            }
            case role::assistant:
                m = parse_assistant_body(body, body_start);
                break;
        }
        conv.messages.push_back(std::move(m));
    }
    bool has_reasoning = std::any_of(conv.messages.begin(), conv.messages.end(),
                                     [](const message & m) { return m.reasoning.has_value(); });
    conv.mode = has_reasoning ? chat_mode::thinking : chat_mode::instruct;
    conv.validate();
    return conv;
}

conversation strip_reasoning(const conversation & conv) {
    conversation out = conv;
    for (auto & m : out.messages) {
        m.reasoning.reset();
    }
    out.mode = chat_mode::instruct;
    return out;
}

std::vector<tool_schema> load_tool_schemas(const json & doc) {
    std::vector<tool_schema> schemas;
    for (const auto & s : doc) {
        tool_schema ts;
        ts.name = s.at("name").get<std::string>();
        for (const auto & same : schemas) {
            if (same.name == ts.name) {
                throw std::runtime_error("duplicate tool schema name: " + ts.name);
            }
        }
        for (const auto & p : s.value("parameters", json::array())) {
            ts.params.push_back({
                p.at("name").get<std::string>(),
                p.at("type").get<std::string>(),
                p.value("required", false),
            });
        }
        schemas.push_back(std::move(ts));
    }
    return schemas;
}

static bool type_matches(const json & v, const std::string & type) {
    if (type == "string")  return v.is_string();
    if (type == "number")  return v.is_number();
    if (type == "integer") return v.is_number_integer();
    if (type == "boolean") return v.is_boolean();
    if (type == "array")   return v.is_array();
    if (type == "object")  return v.is_object();
    return false;
}

validation_report validate_tool_calls(const conversation & conv, const std::vector<tool_schema> & schemas) {
    validation_report report;
    for (size_t mi = 0; mi < conv.messages.size(); mi++) {
        const auto & m = conv.messages[mi];
        for (size_t ci = 0; ci < m.tool_calls.size(); ci++) {
            const auto & call = m.tool_calls[ci];
            tool_call_check check{mi, ci, false, ""};
            if (!call.is_object() || !call.contains("name") || !call["name"].is_string() ||
                !call.contains("arguments") || !call["arguments"].is_object()) {
                check.reason = "malformed payload: expected {name: string, arguments: object}";
            } else {
                const std::string name = call["name"].get<std::string>();
                auto it = std::find_if(schemas.begin(), schemas.end(),
                                       [&](const tool_schema & s) { return s.name == name; });
                if (it == schemas.end()) {
                    check.reason = "unknown tool: " + name;
                } else {
                    const auto & args = call["arguments"];
                    for (const auto & p : it->params) {
                        if (!args.contains(p.name)) {
                            if (p.required) {
                                check.reason = "missing required parameter: " + p.name;
                                break;
                            }
                            continue;
                        }
                        if (!type_matches(args[p.name], p.type)) {
                            check.reason = "parameter " + p.name + " is not of type " + p.type;
                            break;
                        }
                    }
                    check.ok = check.reason.empty();
                }
            }
            if (!check.ok) {
                report.passed = false;
            }
            report.checks.push_back(std::move(check));
        }
    }
    return report;
}

json conversation_to_json(const conversation & conv) {
    json msgs = json::array();
    for (const auto & m : conv.messages) {
        json jm = {{"role", role_name(m.msg_role)}, {"content", m.content}};
        if (m.reasoning) {
            jm["reasoning"] = *m.reasoning;
        }
        if (!m.tool_calls.empty()) {
            jm["tool_calls"] = m.tool_calls;
        }
        msgs.push_back(std::move(jm));
    }
    return {
        {"messages", std::move(msgs)},
        {"language", language_name(conv.lang)},
        {"source_tag", conv.source_tag},
        {"mode", conv.mode == chat_mode::thinking ? "thinking" : "instruct"},
    };
}

conversation conversation_from_json(const json & j) {
    conversation conv;
    for (const auto & jm : j.at("messages")) {
        message m;
        m.msg_role = role_from_name(jm.at("role").get<std::string>());
        m.content = jm.at("content").get<std::string>();
        if (jm.contains("reasoning")) {
            m.reasoning = jm["reasoning"].get<std::string>();
        }
        if (jm.contains("tool_calls")) {
            m.tool_calls = jm["tool_calls"].get<std::vector<json>>();
        }
        conv.messages.push_back(std::move(m));
    }
    conv.lang = language_from_name(j.value("language", "mixed"));
    conv.source_tag = j.value("source_tag", "");
    conv.mode = j.value("mode", "instruct") == std::string("thinking") ? chat_mode::thinking : chat_mode::instruct;
    conv.validate();
    return conv;
}

} // namespace dicta
