#pragma once

#include "dicta/chatml.hpp"
#include "dicta/client.hpp"
#include "dicta/evalbench.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace dicta {

enum class pair_origin { source, onpolicy, identity, language_stickiness };

std::string pair_origin_name(pair_origin o);
pair_origin pair_origin_from_name(std::string_view name);

struct preference_pair {
    conversation prompt;
    message      chosen;
    message      rejected;
    pair_origin  origin = pair_origin::source;
    language     lang   = language::en;
    std::string  detail;  // bookkeeping (judge verdicts, tie notes)

    void validate() const;  // chosen != rejected, prompt non-empty
};

// Drops pairs whose prompt or responses are not majority-Latin-script
// (0.8 character-share threshold), then takes a seeded uniform sample of
// exactly n. Throws if n exceeds the survivor count.
std::vector<preference_pair> filter_and_sample(const std::vector<preference_pair> & pairs,
                                               size_t n, uint64_t seed);

bool is_english_pair(const preference_pair & pair, double latin_share_threshold = 0.8);

// Seeded selection of floor(fraction * N) pairs; the model generates a
// response per selected prompt and the judge decides which response becomes
// chosen. Generation/judge failures pass the pair through unmodified.
std::vector<preference_pair> onpolicy_inject(const std::vector<preference_pair> & pairs,
                                             double fraction, model_client & model,
                                             model_client & judge, uint64_t seed,
                                             const judge_options & jopts = {});

// chosen = the conversation's final assistant identity answer;
// rejected = generator output; a rejected equal to chosen is discarded.
std::vector<preference_pair> gen_identity_pairs(const std::vector<conversation> & identity_convs,
                                                model_client & negative_generator);

// chosen = response sampled with the language directive appended after the
// tool response; rejected = response sampled without it, kept only when its
// dominant script differs from the target's. The directive turn is removed
// from the stored prompt.
struct stickiness_options {
    std::string directive_he = "Make sure your final response is in Hebrew";
    std::string directive_en = "Make sure your final response is in English";
};

std::vector<preference_pair> gen_language_stickiness(const std::vector<conversation> & prompts,
                                                     model_client & model, language target,
                                                     const stickiness_options & opts = {});

nlohmann::json  preference_pair_to_json(const preference_pair & pair);
preference_pair preference_pair_from_json(const nlohmann::json & j);

} // namespace dicta
