#pragma once

#include "dicta/chatml.hpp"
#include "dicta/client.hpp"
#include "dicta/tokenizer.hpp"
#include "dicta/util.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace dicta {

struct document {
    std::string id;
    std::string text;
    language    lang = language::he;
    size_t      token_count = 0;  // under the active tokenizer
    std::string source_tag;
};

struct pool_split {
    std::vector<document> long_pool;   // token_count > threshold
    std::vector<document> short_pool;  // token_count <= threshold
    size_t threshold = 6144;
};

struct mixture_spec {
    std::map<std::string, double>  pool_weights;      // pool name -> probability
    std::map<language, double>     language_weights;  // empty = ignore language dimension
    size_t   token_budget = 0;
    uint64_t seed         = 0;

    void validate() const;  // weights sum to 1 +- 1e-9, budget > 0
};

struct ingest_result {
    std::vector<document>   documents;
    std::vector<item_error> errors;
};

enum class ingest_format { jsonl, plain_dir };

// JSONL fields {id, text, language, source_tag}; token_count is always
// recomputed with the tokenizer, never trusted from input.
ingest_result ingest_documents(const std::string & path, ingest_format format, const tokenizer & tok);

pool_split split_pools(std::vector<document> docs, size_t threshold);

// Draws pool by weight, then language by weight (when given), then a document
// uniformly: without replacement until the bucket is exhausted, then with
// replacement. Stops once cumulative token_count >= token_budget.
std::vector<document> sample_mixture(const pool_split & split, const mixture_spec & spec);

// total tokens / total whitespace-separated words
double compression_ratio(const tokenizer & tok, const std::vector<document> & corpus);
std::map<language, double> compression_ratio_by_language(const tokenizer & tok, const std::vector<document> & corpus);

// Conversation translation. One request per conversation; turns are joined
// with a delimiter line the client must echo between translated turns.
struct translate_options {
    std::string prompt =
        "Translate the following conversation turns to Hebrew. "
        "Keep the turn separator lines exactly as given and translate nothing inside them.";
    std::string turn_delimiter = "<<<TURN>>>";
};

struct translate_rejected : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Preserves turn count, role sequence, and tool-call payload bytes; only text
// content is translated. Throws client_error (retryable) on transport failure
// and translate_rejected on a structure mismatch in the client output.
conversation translate_conversation(const conversation & conv, model_client & client,
                                    const translate_options & opts = {});

// overlap(a,b) == overlap(b,a); multiset token intersection over max length
double token_overlap(const tokenizer & tok, std::string_view a, std::string_view b);

// false = drop: some assistant turn is character-identical to the source or
// has token overlap > 0.9 with it.
bool degeneracy_filter(const tokenizer & tok, const conversation & src, const conversation & translated,
                       double overlap_threshold = 0.9);

// A conversation template: alternating user/assistant turn templates with
// {field} placeholders substituted verbatim from the record.
struct conv_template {
    std::vector<std::pair<role, std::string>> turns;
};

std::vector<conv_template> load_templates(const std::string & path);  // JSONL {user, assistant} or {turns:[{role,text}]}

struct templatize_result {
    std::vector<conversation> conversations;
    std::vector<item_error>   errors;
};

templatize_result templatize_pairs(const std::vector<nlohmann::json> & records,
                                   const std::vector<conv_template> & templates, uint64_t seed);

// Generic system-directive augmentation hook: prepends (or appends to an
// existing system turn) the given directive text.
conversation augment_system_directive(const conversation & conv, const std::string & directive);

} // namespace dicta
