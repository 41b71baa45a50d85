#include "dicta/prefmix.hpp"

#include "dicta/hebrew.hpp"
#include "dicta/util.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <set>

namespace dicta {

using json = nlohmann::json;

std::string pair_origin_name(pair_origin o) {
    switch (o) {
        case pair_origin::source:               return "source";
        case pair_origin::onpolicy:             return "onpolicy";
        case pair_origin::identity:             return "identity";
        case pair_origin::language_stickiness:  return "language_stickiness";
    }
    throw std::logic_error("bad pair origin");
}

pair_origin pair_origin_from_name(std::string_view name) {
    if (name == "source")               return pair_origin::source;
    if (name == "onpolicy")             return pair_origin::onpolicy;
    if (name == "identity")             return pair_origin::identity;
    if (name == "language_stickiness")  return pair_origin::language_stickiness;
    throw std::runtime_error("unknown pair origin: " + std::string(name));
}

void preference_pair::validate() const {
    if (prompt.messages.empty()) {
        throw std::runtime_error("preference pair with empty prompt");
    }
    if (chosen.content == rejected.content) {
        throw std::runtime_error("degenerate preference pair: chosen == rejected");
    }
}

bool is_english_pair(const preference_pair & pair, double latin_share_threshold) {
    std::string prompt_text;
    for (const auto & m : pair.prompt.messages) {
        prompt_text += m.content;
        prompt_text += "\n";
    }
    return latin_letter_share(prompt_text) >= latin_share_threshold &&
           latin_letter_share(pair.chosen.content) >= latin_share_threshold &&
           latin_letter_share(pair.rejected.content) >= latin_share_threshold;
}

std::vector<preference_pair> filter_and_sample(const std::vector<preference_pair> & pairs,
                                               size_t n, uint64_t seed) {
    std::vector<size_t> survivors;
    for (size_t i = 0; i < pairs.size(); i++) {
        if (is_english_pair(pairs[i])) {
            survivors.push_back(i);
        }
    }
    if (n > survivors.size()) {
        throw std::runtime_error("requested " + std::to_string(n) + " pairs but only " +
                                 std::to_string(survivors.size()) + " survive the English filter");
    }
    rng r(seed);
    r.shuffle(survivors);
    std::vector<preference_pair> out;
    out.reserve(n);
    for (size_t i = 0; i < n; i++) {
        out.push_back(pairs[survivors[i]]);
    }
    return out;
}

std::vector<preference_pair> onpolicy_inject(const std::vector<preference_pair> & pairs,
                                             double fraction, model_client & model,
                                             model_client & judge, uint64_t seed,
                                             const judge_options & jopts) {
    if (fraction <= 0.0 || fraction >= 1.0) {
        throw std::runtime_error("onpolicy_inject: fraction must be in (0, 1)");
    }
    size_t k = (size_t) ((double) pairs.size() * fraction);  // floor
    std::vector<size_t> order(pairs.size());
    std::iota(order.begin(), order.end(), 0);
    rng r(seed);
    r.shuffle(order);
    std::set<size_t> selected(order.begin(), order.begin() + (long) k);

    std::vector<preference_pair> out;
    out.reserve(pairs.size());
    for (size_t i = 0; i < pairs.size(); i++) {
        if (!selected.count(i)) {
            out.push_back(pairs[i]);
            continue;
        }
        preference_pair pair = pairs[i];
        try {
            std::string onpolicy = model.complete(pair.prompt.messages);
            if (onpolicy == pair.chosen.content) {
                pair.detail = "onpolicy: degenerate (matched chosen), passed through";
                out.push_back(std::move(pair));
                continue;
            }
            std::string prompt_text;
            for (const auto & m : pair.prompt.messages) {
                prompt_text += m.content + "\n";
            }
            auto verdict = judge_pairwise(prompt_text, onpolicy, pair.chosen.content, judge, jopts);
            if (!verdict) {
                pair.detail = "onpolicy: judge unparseable, passed through";
                out.push_back(std::move(pair));
                continue;
            }
            message onpolicy_msg;
            onpolicy_msg.msg_role = role::assistant;
            onpolicy_msg.content = onpolicy;
            if (*verdict == 1.0) {
                pair.rejected = pair.chosen;
                pair.chosen = std::move(onpolicy_msg);
                pair.detail = "onpolicy: preferred";
            } else {
                pair.rejected = std::move(onpolicy_msg);
                pair.detail = *verdict == 0.5 ? "onpolicy: tie, original orientation kept"
                                              : "onpolicy: not preferred";
            }
            pair.origin = pair_origin::onpolicy;
            pair.validate();
            out.push_back(std::move(pair));
        } catch (const client_error & e) {
            std::fprintf(stderr, "onpolicy_inject: pair %zu passed through: %s\n", i, e.what());
            out.push_back(pairs[i]);
        }
    }
    return out;
}

std::vector<preference_pair> gen_identity_pairs(const std::vector<conversation> & identity_convs,
                                                model_client & negative_generator) {
    std::vector<preference_pair> out;
    for (size_t i = 0; i < identity_convs.size(); i++) {
        const conversation & conv = identity_convs[i];
        if (conv.messages.empty() || conv.messages.back().msg_role != role::assistant) {
            throw std::runtime_error("identity conversation " + std::to_string(i) +
                                     " must end with an assistant answer");
        }
        preference_pair pair;
        pair.prompt = conv;
        pair.prompt.messages.pop_back();
        pair.chosen = conv.messages.back();
        pair.origin = pair_origin::identity;
        pair.lang = conv.lang == language::he ? language::he : language::en;
        try {
            std::string negative = negative_generator.complete(pair.prompt.messages);
            if (negative == pair.chosen.content) {
                continue;  // generator echoed the true identity
            }
            pair.rejected.msg_role = role::assistant;
            pair.rejected.content = negative;
            pair.validate();
            out.push_back(std::move(pair));
        } catch (const client_error & e) {
            std::fprintf(stderr, "gen_identity_pairs: item %zu skipped: %s\n", i, e.what());
        }
    }
    return out;
}

std::vector<preference_pair> gen_language_stickiness(const std::vector<conversation> & prompts,
                                                     model_client & model, language target,
                                                     const stickiness_options & opts) {
    if (target == language::mixed) {
        throw std::runtime_error("gen_language_stickiness: target must be he or en");
    }
    const std::string & directive = target == language::he ? opts.directive_he : opts.directive_en;
    std::vector<preference_pair> out;
    for (size_t i = 0; i < prompts.size(); i++) {
        const conversation & conv = prompts[i];
        size_t tool_idx = conv.messages.size();
        for (size_t m = conv.messages.size(); m > 0; m--) {
            if (conv.messages[m - 1].msg_role == role::tool) {
                tool_idx = m - 1;
                break;
            }
        }
        if (tool_idx == conv.messages.size()) {
            throw std::runtime_error("stickiness prompt " + std::to_string(i) + " has no tool-response turn");
        }
        conversation augmented = conv;
        message dir;
        dir.msg_role = role::user;
        dir.content = directive;
        augmented.messages.insert(augmented.messages.begin() + (long) tool_idx + 1, dir);
        try {
            std::string with_directive = model.complete(augmented.messages);
            std::string without = model.complete(conv.messages);
            bool rejected_in_target = target == language::he
                ? hebrew_letter_share(without) >= 0.5
                : latin_letter_share(without) >= 0.5;
            if (rejected_in_target) {
                std::fprintf(stderr, "gen_language_stickiness: item %zu discarded: no contrast\n", i);
                continue;
            }
            preference_pair pair;
            pair.prompt = conv;  // directive never stored
            pair.chosen.msg_role = role::assistant;
            pair.chosen.content = with_directive;
            pair.rejected.msg_role = role::assistant;
            pair.rejected.content = without;
            pair.origin = pair_origin::language_stickiness;
            pair.lang = target;
            for (const auto & m : pair.prompt.messages) {
                if (m.content.find(directive) != std::string::npos) {
                    throw std::logic_error("stickiness directive leaked into stored prompt");
                }
            }
            pair.validate();
            out.push_back(std::move(pair));
        } catch (const client_error & e) {
            std::fprintf(stderr, "gen_language_stickiness: item %zu skipped: %s\n", i, e.what());
        }
    }
    return out;
}

json preference_pair_to_json(const preference_pair & pair) {
    auto msg_json = [](const message & m) {
        return json{{"role", role_name(m.msg_role)}, {"content", m.content}};
    };
    return {
        {"prompt", conversation_to_json(pair.prompt)},
        {"chosen", msg_json(pair.chosen)},
        {"rejected", msg_json(pair.rejected)},
        {"origin", pair_origin_name(pair.origin)},
        {"language", language_name(pair.lang)},
        {"detail", pair.detail},
    };
}

preference_pair preference_pair_from_json(const json & j) {
    preference_pair pair;
    pair.prompt = conversation_from_json(j.at("prompt"));
    pair.chosen.msg_role = role_from_name(j.at("chosen").at("role").get<std::string>());
    pair.chosen.content = j.at("chosen").at("content").get<std::string>();
    pair.rejected.msg_role = role_from_name(j.at("rejected").at("role").get<std::string>());
    pair.rejected.content = j.at("rejected").at("content").get<std::string>();
    pair.origin = pair_origin_from_name(j.at("origin").get<std::string>());
    pair.lang = language_from_name(j.at("language").get<std::string>());
    pair.detail = j.value("detail", "");
    pair.validate();
    return pair;
}

} // namespace dicta
