#pragma once

#include <nlohmann/json.hpp>

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dicta {

enum class role { system, user, assistant, tool };

std::string role_name(role r);
role        role_from_name(std::string_view name);

enum class language { he, en, mixed };

std::string language_name(language l);
language    language_from_name(std::string_view name);

enum class chat_mode { thinking, instruct };

// The eight reserved special-token strings of the chat template.
inline constexpr std::array<std::string_view, 8> RESERVED_TOKENS = {
    "<|im_start|>", "<|im_end|>",
    "<tool_response>", "</tool_response>",
    "<tool_call>", "</tool_call>",
    "<think>", "</think>",
};

struct message {
    role        msg_role = role::user;
    std::string content;
    std::optional<std::string>  reasoning;   // assistant only
    std::vector<nlohmann::json> tool_calls;  // assistant only

    bool operator==(const message & other) const = default;
};

struct conversation {
    std::vector<message> messages;
    language    lang       = language::mixed;
    std::string source_tag;
    chat_mode   mode       = chat_mode::instruct;

    // language/source_tag are sidecar metadata, not part of the rendered
    // surface; equality covers what the template encodes.
    bool operator==(const conversation & other) const {
        return messages == other.messages && mode == other.mode;
    }

    void validate() const;  // throws on invariant violations
};

struct parse_error : std::runtime_error {
    size_t offset;  // byte offset into the input
    parse_error(const std::string & msg, size_t offset_)
        : std::runtime_error(msg + " (at byte " + std::to_string(offset_) + ")"), offset(offset_) {}
};

// Render a conversation to the exact template surface form:
//   <|im_start|>{role}\n{body}<|im_end|>\n
// assistant body in thinking mode: <think>\n{reasoning}\n</think>\n\n{content}
// tool calls: \n<tool_call>\n{canonical json}\n</tool_call> appended per call
// tool role content: <tool_response>\n{content}\n</tool_response>
// Throws std::runtime_error if content/reasoning contain a reserved token,
// or if reasoning is present in instruct mode.
std::string render(const conversation & conv);

// Inverse of render. parse(render(c)) == c for every valid c.
// mode is inferred: thinking iff any message carries a reasoning section.
conversation parse(std::string_view text);

// Removes every reasoning section and switches mode to instruct.
conversation strip_reasoning(const conversation & conv);

struct tool_schema {
    struct param {
        std::string name;
        std::string type;  // string|number|integer|boolean|array|object
        bool        required = false;
    };
    std::string        name;
    std::vector<param> params;
};

std::vector<tool_schema> load_tool_schemas(const nlohmann::json & doc);

struct tool_call_check {
    size_t      message_index = 0;
    size_t      call_index    = 0;
    bool        ok            = false;
    std::string reason;  // empty when ok
};

struct validation_report {
    std::vector<tool_call_check> checks;
    bool passed = true;
};

validation_report validate_tool_calls(const conversation & conv, const std::vector<tool_schema> & schemas);

// JSONL record form: {messages:[{role,content,reasoning?,tool_calls?}], language, source_tag, mode}
nlohmann::json conversation_to_json(const conversation & conv);
conversation   conversation_from_json(const nlohmann::json & j);

// Canonical payload form used by the renderer: sorted keys, no whitespace.
std::string canonical_json(const nlohmann::json & j);

// True if text contains any of the eight reserved tokens.
bool contains_reserved_token(std::string_view text);

} // namespace dicta
