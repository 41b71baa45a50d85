#pragma once

#include "dicta/chatml.hpp"
#include "dicta/util.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace dicta {

struct reward {
    double value = 0.0;  // in [0, 1]
    std::vector<std::string> detail;  // per-unit breakdown
};

// One word of a dependency parse: head 0 means root.
struct dep_word {
    std::string form;
    std::string upos;
    size_t      head = 0;
    std::string deprel;

    bool operator==(const dep_word &) const = default;
};

struct dep_parse {
    std::vector<dep_word> words;

    void validate() const;  // heads in range, no self-heads
};

// CoNLL-U: consumes ID, FORM, UPOS, HEAD, DEPREL; skips comments, multiword
// tokens (ID with '-') and empty nodes (ID with '.').
std::vector<dep_parse> parse_conllu(std::string_view text);
dep_parse              parse_conllu_sentence(std::string_view text);
std::string            dep_parse_to_conllu(const dep_parse & parse);

// percent of words correctly diacritized: positional word comparison at
// codepoint identity after composed-form normalization
reward score_nikud(std::string_view gold, std::string_view response);

// percent of correct labels: per gold word, upos/head/deprel checked
// independently; a form mismatch at a position scores 0 of 3
reward score_ud(const dep_parse & gold, const dep_parse & hyp);

enum class reward_task { ifeval, math, nikud, ud_parse };

std::string reward_task_name(reward_task t);
reward_task reward_task_from_name(std::string_view name);

// A registered constraint: id, parameters, and directive text per language.
struct constraint {
    std::string    id;
    nlohmann::json params;       // verifier parameters
    std::string    directive_he; // natural-language directive appended to prompts
    std::string    directive_en;
};

struct constraint_set {
    std::vector<constraint> constraints;

    static constraint_set load(const std::string & path);  // JSON array file
    const constraint & find(std::string_view id) const;    // throws on unknown id
};

// Binary constraint verifier; throws on unknown constraint id.
// Shipped inventory: no_uppercase, all_uppercase, min_words, max_words,
// include_keyword, exclude_keyword, starts_with, ends_with, paragraph_count,
// all_hebrew_script, all_latin_script, valid_json, numbered_list,
// exact_words.
reward verify_constraint(std::string_view constraint_id, const nlohmann::json & params,
                         std::string_view response);

// 1 iff the extracted final answer (last boxed expression, else last
// number-like token) is exactly equivalent to gold after rational
// normalization; non-numeric golds compare verbatim.
reward score_math(std::string_view gold, std::string_view response);

// exposed for the oracle tests
std::string extract_final_answer(std::string_view response);
bool        math_answers_equivalent(std::string_view gold, std::string_view answer);

struct reward_item {
    std::string  id;
    conversation prompt;
    reward_task  task = reward_task::ifeval;
    nlohmann::json gold;  // task-specific payload
    language     lang = language::he;

    void validate() const;
};

// Dispatches to the task scorer; well-formed <think> blocks are stripped
// from the response first.
reward compute_reward(const reward_item & item, std::string_view response);

// Removes every well-formed <think>...</think> block.
std::string strip_think_blocks(std::string_view response);

// ifeval items get a seeded uniform constraint whose directive is appended
// to the final user turn; other tasks pass through with gold attached.
std::vector<reward_item> build_reward_dataset(
    const std::vector<conversation> & sft_prompts,
    const constraint_set & constraints,
    const std::vector<std::pair<conversation, std::string>> & math_items,   // (prompt, gold answer)
    const std::vector<std::string> & nikud_gold,                            // diacritized sentences
    const std::vector<std::pair<conversation, dep_parse>> & ud_items,
    uint64_t seed);

nlohmann::json reward_item_to_json(const reward_item & item);
reward_item    reward_item_from_json(const nlohmann::json & j);

} // namespace dicta
