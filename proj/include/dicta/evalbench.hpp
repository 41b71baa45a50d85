#pragma once

#include "dicta/chatml.hpp"
#include "dicta/client.hpp"
#include "dicta/tokenizer.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dicta {

enum class eval_task_name { summarization, translation, trivia, winograd, nikud };
enum class eval_scoring { judge_winrate, exact_match, choice, nikud_macro };

std::string     eval_task_label(eval_task_name t);
eval_task_name  eval_task_from_label(std::string_view label);
eval_scoring    scoring_for(eval_task_name t);

struct eval_item {
    std::string  id;
    conversation prompt;
    std::optional<std::string> reference;  // judge tasks: reference-model response
    std::optional<std::string> gold;       // trivia/winograd/nikud
    std::vector<std::string>   options;    // winograd: the two choices
};

struct eval_task {
    eval_task_name name;
    std::vector<eval_item> items;

    eval_scoring scoring() const { return scoring_for(name); }
    void validate() const;
};

struct eval_result {
    std::string task;
    struct item_score {
        std::string id;
        double      score = 0.0;
        size_t      response_tokens = 0;
    };
    std::vector<item_score>  per_item;   // scored items, in item-id input order
    std::vector<std::string> unscored;   // excluded item ids
    double aggregate   = 0.0;            // 100 x mean(per-item scores)
    double mean_tokens = 0.0;
    bool   valid       = true;           // false when >10% of items were unscored

    nlohmann::json to_json() const;
};

// Default single-verdict-token rubric; a versioned override can be loaded
// from a text file with {prompt}, {response_a}, {response_b} placeholders.
extern const char * DEFAULT_JUDGE_TEMPLATE;

struct judge_options {
    std::string prompt_template = DEFAULT_JUDGE_TEMPLATE;
    int retries = 1;  // per query, after the first attempt
};

// 1 = test wins, 0 = reference wins, 0.5 = tie. The judge is queried twice
// with candidate order swapped; inconsistent verdicts score 0.5.
// Returns nullopt when a verdict cannot be parsed after retries.
std::optional<double> judge_pairwise(const std::string & prompt_text,
                                     const std::string & test_response,
                                     const std::string & reference_response,
                                     model_client & judge,
                                     const judge_options & opts = {});

// 1 iff trimmed response equals gold, or the response's final line does
double score_exact(std::string_view gold, std::string_view response);

// 1 iff the response selects the gold option: exact trimmed match or
// unambiguous containment of exactly one option
double score_choice(std::string_view gold, std::string_view other, std::string_view response);

struct run_options {
    int    model_retries = 2;
    double max_unscored_fraction = 0.10;
};

eval_result run_task(const eval_task & task, model_client & model, model_client * judge,
                     const tokenizer & tok, const run_options & opts = {},
                     const judge_options & jopts = {});

// Aligned-text and CSV leaderboard row: Summarization, Translation, Winograd,
// Trivia, Nikud, aggregates to 2 decimals, blanks for missing tasks.
struct leaderboard_row {
    std::string text;
    std::string csv;
};

leaderboard_row emit_leaderboard(const std::vector<eval_result> & results, const std::string & model_name);

std::vector<eval_item> load_eval_items(const std::string & path);  // JSONL
nlohmann::json eval_item_to_json(const eval_item & item);
eval_item      eval_item_from_json(const nlohmann::json & j);

} // namespace dicta
