#include "dicta/rewards.hpp"

#include "dicta/hebrew.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <sstream>

namespace dicta {

using json = nlohmann::json;

void dep_parse::validate() const {
    for (size_t i = 0; i < words.size(); i++) {
        const auto & w = words[i];
        if (w.head > words.size()) {
            throw std::runtime_error("word " + std::to_string(i + 1) + " ('" + w.form +
                                     "'): head " + std::to_string(w.head) + " out of range");
        }
        if (w.head == i + 1) {
            throw std::runtime_error("word " + std::to_string(i + 1) + " ('" + w.form + "'): self-head");
        }
    }
}

std::vector<dep_parse> parse_conllu(std::string_view text) {
    std::vector<dep_parse> sentences;
    dep_parse current;
    size_t pos = 0;
    auto flush = [&]() {
        if (!current.words.empty()) {
            current.validate();
            sentences.push_back(std::move(current));
            current = {};
        }
    };
    while (pos <= text.size()) {
        size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, (nl == std::string_view::npos ? text.size() : nl) - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;

        if (line.empty() || line == "\r") {
            flush();
            continue;
        }
        if (line[0] == '#') {
            continue;
        }
        std::vector<std::string> cols;
        size_t cp = 0;
        while (cp <= line.size()) {
            size_t tab = line.find('\t', cp);
            cols.emplace_back(line.substr(cp, (tab == std::string_view::npos ? line.size() : tab) - cp));
            if (tab == std::string_view::npos) {
                break;
            }
            cp = tab + 1;
        }
        if (cols.size() < 8) {
            throw std::runtime_error("conllu: line with fewer than 8 columns: " + std::string(line));
        }
        const std::string & id = cols[0];
        if (id.find('-') != std::string::npos || id.find('.') != std::string::npos) {
            continue;  // multiword token range / empty node
        }
        dep_word w;
        w.form = cols[1];
        w.upos = cols[3];
        w.head = cols[6] == "_" ? 0 : (size_t) std::stoull(cols[6]);
        w.deprel = cols[7];
        current.words.push_back(std::move(w));
    }
    flush();
    return sentences;
}

dep_parse parse_conllu_sentence(std::string_view text) {
    auto sentences = parse_conllu(text);
    if (sentences.size() != 1) {
        throw std::runtime_error("expected exactly one sentence, got " + std::to_string(sentences.size()));
    }
    return sentences[0];
}

std::string dep_parse_to_conllu(const dep_parse & parse) {
    std::string out;
    for (size_t i = 0; i < parse.words.size(); i++) {
        const auto & w = parse.words[i];
        out += std::to_string(i + 1) + "\t" + w.form + "\t_\t" + w.upos + "\t_\t_\t" +
               std::to_string(w.head) + "\t" + w.deprel + "\t_\t_\n";
    }
    return out;
}

reward score_nikud(std::string_view gold, std::string_view response) {
    std::vector<std::string> gold_words = split_words(normalize_hebrew(gold));
    if (gold_words.empty()) {
        throw std::runtime_error("score_nikud: empty gold sentence");
    }
    std::vector<std::string> hyp_words = split_words(normalize_hebrew(response));
    reward r;
    size_t correct = 0;
    for (size_t i = 0; i < gold_words.size(); i++) {
        bool ok = i < hyp_words.size() && hyp_words[i] == gold_words[i];
        if (ok) {
            correct++;
        }
        r.detail.push_back("word " + std::to_string(i + 1) + ": " + (ok ? "correct" : "wrong"));
    }
    r.value = (double) correct / (double) gold_words.size();
    return r;
}

reward score_ud(const dep_parse & gold, const dep_parse & hyp) {
    if (gold.words.empty()) {
        throw std::runtime_error("score_ud: empty gold parse");
    }
    reward r;
    size_t correct = 0;
    for (size_t i = 0; i < gold.words.size(); i++) {
        const auto & g = gold.words[i];
        if (i >= hyp.words.size() || hyp.words[i].form != g.form) {
            r.detail.push_back("word " + std::to_string(i + 1) + " ('" + g.form + "'): form mismatch, 0/3");
            continue;
        }
        const auto & h = hyp.words[i];
        size_t sub = (h.upos == g.upos) + (h.head == g.head) + (h.deprel == g.deprel);
        correct += sub;
        r.detail.push_back("word " + std::to_string(i + 1) + " ('" + g.form + "'): " +
                           std::to_string(sub) + "/3");
    }
    r.value = (double) correct / (double) (3 * gold.words.size());
    return r;
}

std::string reward_task_name(reward_task t) {
    switch (t) {
        case reward_task::ifeval:   return "ifeval";
        case reward_task::math:     return "math";
        case reward_task::nikud:    return "nikud";
        case reward_task::ud_parse: return "ud_parse";
    }
    throw std::logic_error("bad reward task");
}

reward_task reward_task_from_name(std::string_view name) {
    if (name == "ifeval")   return reward_task::ifeval;
    if (name == "math")     return reward_task::math;
    if (name == "nikud")    return reward_task::nikud;
    if (name == "ud_parse") return reward_task::ud_parse;
    throw std::runtime_error("unknown reward task: " + std::string(name));
}

constraint_set constraint_set::load(const std::string & path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open constraint file: " + path);
    }
    json doc = json::parse(in);
    constraint_set set;
    for (const auto & c : doc) {
        set.constraints.push_back({
            c.at("id").get<std::string>(),
            c.value("params", json::object()),
            c.at("directive_he").get<std::string>(),
            c.at("directive_en").get<std::string>(),
        });
    }
    return set;
}

const constraint & constraint_set::find(std::string_view id) const {
    for (const auto & c : constraints) {
        if (c.id == id) {
            return c;
        }
    }
    throw std::runtime_error("unknown constraint id: " + std::string(id));
}

static size_t count_paragraphs(std::string_view text) {
    size_t count = 0;
    bool in_para = false;
    size_t blank_run = 0;
    std::istringstream ss{std::string(text)};
    std::string line;
    while (std::getline(ss, line)) {
        if (trim(line).empty()) {
            blank_run++;
            in_para = false;
        } else {
            if (!in_para) {
                count++;
            }
            in_para = true;
            blank_run = 0;
        }
    }
    (void) blank_run;
    return count;
}

static bool is_numbered_list(std::string_view text, size_t n) {
    std::istringstream ss{std::string(text)};
    std::string line;
    size_t expect = 1;
    while (std::getline(ss, line)) {
        std::string t = trim(line);
        if (t.empty()) {
            continue;
        }
        std::string prefix = std::to_string(expect) + ".";
        if (!starts_with(t, prefix)) {
            return false;
        }
        expect++;
    }
    return expect == n + 1;
}

reward verify_constraint(std::string_view constraint_id, const json & params, std::string_view response) {
    std::string trimmed = trim(response);
    bool ok = false;
    if (constraint_id == "no_uppercase") {
        ok = std::none_of(response.begin(), response.end(), [](unsigned char c) { return std::isupper(c); });
    } else if (constraint_id == "all_uppercase") {
        bool has_letter = std::any_of(response.begin(), response.end(), [](unsigned char c) { return std::isalpha(c); });
        ok = has_letter && std::none_of(response.begin(), response.end(), [](unsigned char c) { return std::islower(c); });
    } else if (constraint_id == "min_words") {
        ok = split_words(response).size() >= params.at("n").get<size_t>();
    } else if (constraint_id == "max_words") {
        ok = split_words(response).size() <= params.at("n").get<size_t>();
    } else if (constraint_id == "exact_words") {
        ok = split_words(response).size() == params.at("n").get<size_t>();
    } else if (constraint_id == "include_keyword") {
        ok = response.find(params.at("keyword").get<std::string>()) != std::string_view::npos;
    } else if (constraint_id == "exclude_keyword") {
        ok = response.find(params.at("keyword").get<std::string>()) == std::string_view::npos;
    } else if (constraint_id == "starts_with") {
        ok = starts_with(trimmed, params.at("text").get<std::string>());
    } else if (constraint_id == "ends_with") {
        ok = ends_with(trimmed, params.at("text").get<std::string>());
    } else if (constraint_id == "paragraph_count") {
        ok = count_paragraphs(response) == params.at("n").get<size_t>();
    } else if (constraint_id == "all_hebrew_script") {
        ok = all_letters_hebrew(response);
    } else if (constraint_id == "all_latin_script") {
        ok = all_letters_latin(response);
    } else if (constraint_id == "valid_json") {
        ok = json::accept(trimmed);
    } else if (constraint_id == "numbered_list") {
        ok = is_numbered_list(response, params.at("n").get<size_t>());
    } else {
        throw std::runtime_error("unknown constraint id: " + std::string(constraint_id));
    }
    reward r;
    r.value = ok ? 1.0 : 0.0;
    r.detail.push_back(std::string(constraint_id) + ": " + (ok ? "followed" : "not followed"));
    return r;
}

// ---- math answer equivalence -----------------------------------------------

namespace {

struct rational {
    __int128 num = 0;
    __int128 den = 1;
    bool ok = false;
};

__int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// integer, decimal, or a/b fraction; commas and a leading $ are stripped;
// at most 18 significant digits per component
rational parse_rational(std::string_view raw) {
    std::string s = trim(raw);
    if (!s.empty() && s[0] == '$') {
        s.erase(0, 1);
    }
    std::erase(s, ',');
    while (!s.empty() && (s.back() == '.' || s.back() == '!' || s.back() == '?' || s.back() == ';' || s.back() == ':')) {
        // trailing sentence punctuation, but keep a '.' that has digits after it
        if (s.back() == '.' && s.find('.') != s.size() - 1) {
            break;
        }
        s.pop_back();
    }
    rational r;
    if (s.empty()) {
        return r;
    }
    size_t slash = s.find('/');
    auto parse_int = [](std::string_view t, __int128 & out) {
        if (t.empty() || t.size() > 19) {
            return false;
        }
        size_t i = 0;
        bool neg = false;
        if (t[0] == '+' || t[0] == '-') {
            neg = t[0] == '-';
            i = 1;
        }
        if (i == t.size() || t.size() - i > 18) {
            return false;
        }
        __int128 v = 0;
        for (; i < t.size(); i++) {
            if (t[i] < '0' || t[i] > '9') {
                return false;
            }
            v = v * 10 + (t[i] - '0');
        }
        out = neg ? -v : v;
        return true;
    };
    if (slash != std::string::npos) {
        __int128 n = 0, d = 0;
        if (!parse_int(std::string_view(s).substr(0, slash), n) ||
            !parse_int(std::string_view(s).substr(slash + 1), d) || d == 0) {
            return r;
        }
        r.num = n;
        r.den = d;
    } else {
        size_t dot = s.find('.');
        if (dot == std::string::npos) {
            if (!parse_int(s, r.num)) {
                return r;
            }
        } else {
            std::string int_part = s.substr(0, dot);
            std::string frac_part = s.substr(dot + 1);
            if (frac_part.empty() || frac_part.size() > 17 ||
                !std::all_of(frac_part.begin(), frac_part.end(), [](char c) { return c >= '0' && c <= '9'; })) {
                return r;
            }
            bool neg = !int_part.empty() && int_part[0] == '-';
            __int128 whole = 0;
            if (int_part.empty() || int_part == "-" || int_part == "+") {
                whole = 0;
            } else if (!parse_int(int_part, whole)) {
                return r;
            }
            if (whole < 0) {
                whole = -whole;
            }
            __int128 scale = 1;
            __int128 frac = 0;
            for (char c : frac_part) {
                scale *= 10;
                frac = frac * 10 + (c - '0');
            }
            r.num = whole * scale + frac;
            if (neg) {
                r.num = -r.num;
            }
            r.den = scale;
        }
    }
    if (r.den < 0) {
        r.num = -r.num;
        r.den = -r.den;
    }
    __int128 g = gcd128(r.num, r.den);
    if (g > 1) {
        r.num /= g;
        r.den /= g;
    }
    r.ok = true;
    return r;
}

} // namespace

std::string extract_final_answer(std::string_view response) {
    // last \boxed{...}, braces matched
    size_t boxed = response.rfind("\\boxed{");
    if (boxed != std::string_view::npos) {
        size_t i = boxed + 7;
        int depth = 1;
        std::string inner;
        while (i < response.size() && depth > 0) {
            char c = response[i];
            if (c == '{') {
                depth++;
            } else if (c == '}') {
                depth--;
                if (depth == 0) {
                    break;
                }
            }
            inner += c;
            i++;
        }
        if (depth == 0) {
            return trim(inner);
        }
    }
    // else the last number-like whitespace token
    std::vector<std::string> words = split_words(response);
    for (auto it = words.rbegin(); it != words.rend(); ++it) {
        std::string w = *it;
        // strip surrounding punctuation
        while (!w.empty() && std::string("()[]{}\"'`*").find(w.front()) != std::string::npos) {
            w.erase(0, 1);
        }
        while (!w.empty() && std::string("()[]{}\"'`*,.;:!?").find(w.back()) != std::string::npos) {
            // keep a '.' that is a decimal point
            if (w.back() == '.' && w.size() >= 2 && std::isdigit((unsigned char) w[w.size() - 2]) &&
                std::count(w.begin(), w.end(), '.') > 1) {
                break;
            }
            w.pop_back();
        }
        if (w.empty()) {
            continue;
        }
        if (std::any_of(w.begin(), w.end(), [](unsigned char c) { return std::isdigit(c); }) &&
            parse_rational(w).ok) {
            return w;
        }
    }
    return "";
}

bool math_answers_equivalent(std::string_view gold, std::string_view answer) {
    rational g = parse_rational(gold);
    rational a = parse_rational(answer);
    if (g.ok && a.ok) {
        return g.num == a.num && g.den == a.den;
    }
    return trim(gold) == trim(answer);
}

reward score_math(std::string_view gold, std::string_view response) {
    reward r;
    std::string answer = extract_final_answer(response);
    if (answer.empty()) {
        r.detail.push_back("no answer found");
        return r;
    }
    bool equivalent = math_answers_equivalent(gold, answer);
    r.value = equivalent ? 1.0 : 0.0;
    r.detail.push_back("extracted: " + answer + (equivalent ? " == " : " != ") + std::string(trim(gold)));
    return r;
}

// ---- dispatch and dataset assembly ------------------------------------------

void reward_item::validate() const {
    if (prompt.messages.empty()) {
        throw std::runtime_error("reward item " + id + ": empty prompt");
    }
    switch (task) {
        case reward_task::ifeval:
            if (!gold.is_object() || !gold.contains("constraint_id")) {
                throw std::runtime_error("reward item " + id + ": ifeval gold must carry constraint_id");
            }
            break;
        case reward_task::math:
        case reward_task::nikud:
            if (!gold.is_string()) {
                throw std::runtime_error("reward item " + id + ": gold must be a string");
            }
            break;
        case reward_task::ud_parse:
            parse_conllu_sentence(gold.get<std::string>());
            break;
    }
}

std::string strip_think_blocks(std::string_view response) {
    std::string out(response);
    while (true) {
        size_t open = out.find("<think>");
        if (open == std::string::npos) {
            break;
        }
        size_t close = out.find("</think>", open);
        if (close == std::string::npos) {
            break;  // unbalanced block is left as-is
        }
        size_t end = close + 8;
        // swallow the whitespace that separated the block from the answer
        while (end < out.size() && (out[end] == '\n' || out[end] == ' ')) {
            end++;
        }
        out.erase(open, end - open);
    }
    return out;
}

reward compute_reward(const reward_item & item, std::string_view response) {
    item.validate();
    std::string answer = strip_think_blocks(response);
    switch (item.task) {
        case reward_task::ifeval:
            return verify_constraint(item.gold.at("constraint_id").get<std::string>(),
                                     item.gold.value("params", json::object()), answer);
        case reward_task::math:
            return score_math(item.gold.get<std::string>(), answer);
        case reward_task::nikud:
            return score_nikud(item.gold.get<std::string>(), answer);
        case reward_task::ud_parse:
            return score_ud(parse_conllu_sentence(item.gold.get<std::string>()),
                            parse_conllu_sentence(answer));
    }
    throw std::logic_error("bad reward task");
}

std::vector<reward_item> build_reward_dataset(
    const std::vector<conversation> & sft_prompts,
    const constraint_set & constraints,
    const std::vector<std::pair<conversation, std::string>> & math_items,
    const std::vector<std::string> & nikud_gold,
    const std::vector<std::pair<conversation, dep_parse>> & ud_items,
    uint64_t seed) {
    if (!sft_prompts.empty() && constraints.constraints.empty()) {
        throw std::runtime_error("build_reward_dataset: ifeval prompts present but constraint set is empty");
    }
    std::vector<reward_item> out;
    rng r(seed);
    size_t n = 0;
    for (const auto & prompt : sft_prompts) {
        const constraint & c = constraints.constraints[r.bounded(constraints.constraints.size())];
        reward_item item;
        item.id = "ifeval-" + std::to_string(n++);
        item.prompt = prompt;
        item.task = reward_task::ifeval;
        item.lang = prompt.lang == language::en ? language::en : language::he;
        const std::string & directive = item.lang == language::he ? c.directive_he : c.directive_en;
        bool appended = false;
        for (auto it = item.prompt.messages.rbegin(); it != item.prompt.messages.rend(); ++it) {
            if (it->msg_role == role::user) {
                it->content += "\n\n" + directive;
                appended = true;
                break;
            }
        }
        if (!appended) {
            throw std::runtime_error("prompt " + item.id + " has no user turn to append a directive to");
        }
        item.gold = {{"constraint_id", c.id}, {"params", c.params}};
        item.validate();
        out.push_back(std::move(item));
    }
    n = 0;
    for (const auto & [prompt, gold] : math_items) {
        reward_item item;
        item.id = "math-" + std::to_string(n++);
        item.prompt = prompt;
        item.task = reward_task::math;
        item.gold = gold;
        item.lang = prompt.lang == language::en ? language::en : language::he;
        item.validate();
        out.push_back(std::move(item));
    }
    n = 0;
    for (const auto & sentence : nikud_gold) {
        reward_item item;
        item.id = "nikud-" + std::to_string(n++);
        message m;
        m.msg_role = role::user;
        m.content = strip_hebrew_marks(sentence);  // prompt carries the bare text, gold keeps the marks
        item.prompt.messages.push_back(std::move(m));
        item.task = reward_task::nikud;
        item.gold = sentence;
        item.lang = language::he;
        item.validate();
        out.push_back(std::move(item));
    }
    n = 0;
    for (const auto & [prompt, gold] : ud_items) {
        reward_item item;
        item.id = "ud-" + std::to_string(n++);
        item.prompt = prompt;
        item.task = reward_task::ud_parse;
        try {
            gold.validate();
        } catch (const std::exception & e) {
            throw std::runtime_error("ud gold for item " + item.id + " invalid: " + e.what());
        }
        item.gold = dep_parse_to_conllu(gold);
        item.lang = language::he;
        item.validate();
        out.push_back(std::move(item));
    }
    return out;
}

json reward_item_to_json(const reward_item & item) {
    return {
        {"id", item.id},
        {"prompt", conversation_to_json(item.prompt)},
        {"task", reward_task_name(item.task)},
        {"gold", item.gold},
        {"language", language_name(item.lang)},
    };
}

reward_item reward_item_from_json(const json & j) {
    reward_item item;
    item.id = j.at("id").get<std::string>();
    item.prompt = conversation_from_json(j.at("prompt"));
    item.task = reward_task_from_name(j.at("task").get<std::string>());
    item.gold = j.at("gold");
    item.lang = language_from_name(j.at("language").get<std::string>());
    item.validate();
    return item;
}

} // namespace dicta
