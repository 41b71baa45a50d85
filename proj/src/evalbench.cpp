#include "dicta/evalbench.hpp"

#include "dicta/rewards.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace dicta {

using json = nlohmann::json;

std::string eval_task_label(eval_task_name t) {
    switch (t) {
        case eval_task_name::summarization: return "summarization";
        case eval_task_name::translation:   return "translation";
        case eval_task_name::trivia:        return "trivia";
        case eval_task_name::winograd:      return "winograd";
        case eval_task_name::nikud:         return "nikud";
    }
    throw std::logic_error("bad eval task");
}

eval_task_name eval_task_from_label(std::string_view label) {
    if (label == "summarization") return eval_task_name::summarization;
    if (label == "translation")   return eval_task_name::translation;
    if (label == "trivia")        return eval_task_name::trivia;
    if (label == "winograd")      return eval_task_name::winograd;
    if (label == "nikud")         return eval_task_name::nikud;
    throw std::runtime_error("unknown eval task: " + std::string(label));
}

eval_scoring scoring_for(eval_task_name t) {
    switch (t) {
        case eval_task_name::summarization:
        case eval_task_name::translation: return eval_scoring::judge_winrate;
        case eval_task_name::trivia:      return eval_scoring::exact_match;
        case eval_task_name::winograd:    return eval_scoring::choice;
        case eval_task_name::nikud:       return eval_scoring::nikud_macro;
    }
    throw std::logic_error("bad eval task");
}

void eval_task::validate() const {
    for (const auto & item : items) {
        if (scoring() == eval_scoring::judge_winrate) {
            if (!item.reference) {
                throw std::runtime_error("item " + item.id + ": judge task requires a reference response");
            }
        } else if (!item.gold) {
            throw std::runtime_error("item " + item.id + ": task requires gold");
        }
        if (scoring() == eval_scoring::choice && item.options.size() != 2) {
            throw std::runtime_error("item " + item.id + ": winograd requires exactly two options");
        }
    }
}

const char * DEFAULT_JUDGE_TEMPLATE =
    "You are comparing two candidate responses to the same request.\n"
    "Request:\n{prompt}\n\n"
    "Response A:\n{response_a}\n\n"
    "Response B:\n{response_b}\n\n"
    "Which response is better? Reply with a single token: A, B, or TIE.";

static std::string fill_template(std::string text, std::string_view key, std::string_view value) {
    std::string needle = "{" + std::string(key) + "}";
    size_t pos;
    while ((pos = text.find(needle)) != std::string::npos) {
        text.replace(pos, needle.size(), value);
    }
    return text;
}

// verdict parse: trimmed reply, or its last word, must be A / B / TIE
static std::optional<char> parse_verdict(const std::string & reply) {
    std::string t = trim(reply);
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return (char) std::toupper(c); });
    if (t == "A" || t == "B" || t == "TIE") {
        return t == "TIE" ? 'T' : t[0];
    }
    auto words = split_words(t);
    if (!words.empty()) {
        std::string last = words.back();
        while (!last.empty() && (last.back() == '.' || last.back() == '!')) {
            last.pop_back();
        }
        if (last == "A" || last == "B" || last == "TIE") {
            return last == "TIE" ? 'T' : last[0];
        }
    }
    return std::nullopt;
}

static std::optional<char> query_verdict(model_client & judge, const std::string & prompt,
                                         const std::string & a, const std::string & b,
                                         const judge_options & opts) {
    std::string text = fill_template(opts.prompt_template, "prompt", prompt);
    text = fill_template(std::move(text), "response_a", a);
    text = fill_template(std::move(text), "response_b", b);
    message m;
    m.msg_role = role::user;
    m.content = text;
    for (int attempt = 0; attempt <= opts.retries; attempt++) {
        if (auto v = parse_verdict(judge.complete({m}))) {
            return v;
        }
    }
    return std::nullopt;
}

std::optional<double> judge_pairwise(const std::string & prompt_text,
                                     const std::string & test_response,
                                     const std::string & reference_response,
                                     model_client & judge,
                                     const judge_options & opts) {
    if (test_response.empty() || reference_response.empty()) {
        throw std::runtime_error("judge_pairwise: responses must be non-empty");
    }
    // order swap: test as A, then test as B
    auto v1 = query_verdict(judge, prompt_text, test_response, reference_response, opts);
    if (!v1) {
        return std::nullopt;
    }
    auto v2 = query_verdict(judge, prompt_text, reference_response, test_response, opts);
    if (!v2) {
        return std::nullopt;
    }
    auto score_of = [](char verdict, bool test_is_a) {
        if (verdict == 'T') {
            return 0.5;
        }
        return (verdict == 'A') == test_is_a ? 1.0 : 0.0;
    };
    double s1 = score_of(*v1, true);
    double s2 = score_of(*v2, false);
    return s1 == s2 ? s1 : 0.5;
}

double score_exact(std::string_view gold, std::string_view response) {
    if (gold.empty()) {
        throw std::runtime_error("score_exact: empty gold");
    }
    std::string t = trim(response);
    if (t == gold) {
        return 1.0;
    }
    size_t nl = t.rfind('\n');
    if (nl != std::string::npos && trim(t.substr(nl + 1)) == gold) {
        return 1.0;
    }
    return 0.0;
}

double score_choice(std::string_view gold, std::string_view other, std::string_view response) {
    if (gold == other) {
        throw std::runtime_error("score_choice: options must be distinct");
    }
    std::string t = trim(response);
    if (t == gold) {
        return 1.0;
    }
    if (t == other) {
        return 0.0;
    }
    bool has_gold = t.find(gold) != std::string::npos;
    bool has_other = t.find(other) != std::string::npos;
    return has_gold && !has_other ? 1.0 : 0.0;
}

static std::string prompt_as_text(const conversation & conv) {
    std::string out;
    for (const auto & m : conv.messages) {
        if (!out.empty()) {
            out += "\n";
        }
        out += m.content;
    }
    return out;
}

eval_result run_task(const eval_task & task, model_client & model, model_client * judge,
                     const tokenizer & tok, const run_options & opts, const judge_options & jopts) {
    task.validate();
    if ((task.scoring() == eval_scoring::judge_winrate) != (judge != nullptr)) {
        throw std::runtime_error(judge ? "judge supplied for a non-judge task"
                                       : "task " + eval_task_label(task.name) + " requires a judge");
    }
    eval_result result;
    result.task = eval_task_label(task.name);

    for (const auto & item : task.items) {
        std::string response;
        bool got_response = false;
        for (int attempt = 0; attempt <= opts.model_retries && !got_response; attempt++) {
            try {
                response = model.complete(item.prompt.messages);
                got_response = true;
            } catch (const client_error & e) {
                if (!e.retryable) {
                    break;
                }
            }
        }
        if (!got_response) {
            result.unscored.push_back(item.id);
            continue;
        }
        std::string answer = strip_think_blocks(response);
        std::optional<double> score;
        switch (task.scoring()) {
            case eval_scoring::judge_winrate:
                score = judge_pairwise(prompt_as_text(item.prompt), answer, *item.reference, *judge, jopts);
                break;
            case eval_scoring::exact_match:
                score = score_exact(*item.gold, answer);
                break;
            case eval_scoring::choice: {
                const std::string & other = item.options[0] == *item.gold ? item.options[1] : item.options[0];
                score = score_choice(*item.gold, other, answer);
                break;
            }
            case eval_scoring::nikud_macro:
                score = answer.empty() ? 0.0 : score_nikud(*item.gold, answer).value;
                break;
        }
        if (!score) {
            result.unscored.push_back(item.id);
            continue;
        }
        result.per_item.push_back({item.id, *score, tok.count(response)});
    }

    if (!result.per_item.empty()) {
        double sum = 0;
        double tokens = 0;
        for (const auto & s : result.per_item) {
            sum += s.score;
            tokens += (double) s.response_tokens;
        }
        result.aggregate = 100.0 * sum / (double) result.per_item.size();
        result.mean_tokens = tokens / (double) result.per_item.size();
    }
    if (!task.items.empty() &&
        (double) result.unscored.size() / (double) task.items.size() > opts.max_unscored_fraction) {
        result.valid = false;
    }
    return result;
}

json eval_result::to_json() const {
    json items = json::array();
    for (const auto & s : per_item) {
        items.push_back({{"id", s.id}, {"score", s.score}, {"response_tokens", s.response_tokens}});
    }
    return {
        {"task", task},
        {"per_item", std::move(items)},
        {"unscored", unscored},
        {"aggregate", aggregate},
        {"mean_tokens", mean_tokens},
        {"valid", valid},
    };
}

leaderboard_row emit_leaderboard(const std::vector<eval_result> & results, const std::string & model_name) {
    static const std::vector<std::string> COLUMNS = {
        "summarization", "translation", "winograd", "trivia", "nikud",
    };
    std::map<std::string, double> by_task;
    for (const auto & r : results) {
        if (by_task.count(r.task)) {
            throw std::runtime_error("duplicate task in leaderboard: " + r.task);
        }
        by_task[r.task] = r.aggregate;
    }
    auto fmt = [](double v) {
        std::ostringstream ss;
        ss << std::fixed << std::setprecision(2) << v;
        return ss.str();
    };
    std::ostringstream text;
    std::ostringstream csv;
    text << std::left << std::setw(28) << "Model";
    csv << "model";
    for (const auto & col : COLUMNS) {
        std::string header = col;
        header[0] = (char) std::toupper((unsigned char) header[0]);
        text << std::right << std::setw(15) << header;
        csv << "," << col;
    }
    text << "\n" << std::left << std::setw(28) << model_name;
    csv << "\n" << model_name;
    for (const auto & col : COLUMNS) {
        auto it = by_task.find(col);
        text << std::right << std::setw(15) << (it == by_task.end() ? "" : fmt(it->second));
        csv << "," << (it == by_task.end() ? "" : fmt(it->second));
    }
    text << "\n";
    csv << "\n";
    return {text.str(), csv.str()};
}

json eval_item_to_json(const eval_item & item) {
    json j = {{"id", item.id}, {"prompt", conversation_to_json(item.prompt)}};
    if (item.reference) {
        j["reference"] = *item.reference;
    }
    if (item.gold) {
        j["gold"] = *item.gold;
    }
    if (!item.options.empty()) {
        j["options"] = item.options;
    }
    return j;
}

eval_item eval_item_from_json(const json & j) {
    eval_item item;
    item.id = j.at("id").get<std::string>();
    if (j.at("prompt").is_string()) {
        message m;
        m.msg_role = role::user;
        m.content = j["prompt"].get<std::string>();
        item.prompt.messages.push_back(std::move(m));
    } else {
        item.prompt = conversation_from_json(j.at("prompt"));
    }
    if (j.contains("reference")) {
        item.reference = j["reference"].get<std::string>();
    }
    if (j.contains("gold")) {
        item.gold = j["gold"].get<std::string>();
    }
    if (j.contains("options")) {
        item.options = j["options"].get<std::vector<std::string>>();
    }
    return item;
}

std::vector<eval_item> load_eval_items(const std::string & path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open eval items: " + path);
    }
    std::vector<eval_item> items;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) {
            continue;
        }
        items.push_back(eval_item_from_json(json::parse(line)));
    }
    return items;
}

} // namespace dicta
