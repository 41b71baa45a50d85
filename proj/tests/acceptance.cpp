// Acceptance suite: one pass/fail line per criterion, exit 0 only if all pass.

#include "dicta/datapipe.hpp"
#include "dicta/evalbench.hpp"
#include "dicta/hebrew.hpp"
#include "dicta/packing.hpp"
#include "dicta/prefmix.hpp"
#include "dicta/rewards.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>

using namespace dicta;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

int failures = 0;

struct check_ctx {
    std::string first_failure;
    size_t checks = 0;

    void expect(bool ok, const std::string & what) {
        checks++;
        if (!ok && first_failure.empty()) {
            first_failure = what;
        }
    }
};

void run_criterion(int number, const std::string & name, double time_limit_s,
                   const std::function<void(check_ctx &)> & body) {
    check_ctx ctx;
    auto start = std::chrono::steady_clock::now();
    try {
        body(ctx);
    } catch (const std::exception & e) {
        ctx.expect(false, std::string("exception: ") + e.what());
    }
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (elapsed >= time_limit_s) {
        ctx.expect(false, "over time limit");
    }
    bool pass = ctx.first_failure.empty();
    if (!pass) {
        failures++;
    }
    std::printf("criterion %d [%s]: %s (%zu checks, %.1fs)%s%s\n", number, name.c_str(),
                pass ? "PASS" : "FAIL", ctx.checks, elapsed,
                pass ? "" : " -- ", pass ? "" : ctx.first_failure.c_str());
    std::fflush(stdout);
}

message msg(role r, std::string content) {
    message m;
    m.msg_role = r;
    m.content = std::move(content);
    return m;
}

std::string read_file(const std::string & path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---- criterion 1+2 helpers ----------------------------------------------------

std::vector<document> synthetic_corpus(size_t n, uint64_t seed) {
    rng r(seed);
    std::vector<document> docs;
    for (size_t i = 0; i < n; i++) {
        document d;
        d.id = "doc" + std::to_string(i);
        d.token_count = 1 + r.bounded(20000);
        d.lang = r.bounded(2) ? language::he : language::en;
        docs.push_back(std::move(d));
    }
    // force the boundary case to be present
    docs[0].token_count = 6144;
    return docs;
}

// ---- criterion 3 helper: exhaustive bin-packing optimum -------------------------

size_t optimal_bins(std::vector<size_t> lengths, size_t capacity) {
    std::sort(lengths.rbegin(), lengths.rend());
    size_t best = lengths.size();
    std::vector<size_t> bins;
    auto rec = [&](auto && self, size_t idx) -> void {
        if (bins.size() >= best) {
            return;
        }
        if (idx == lengths.size()) {
            best = bins.size();
            return;
        }
        for (size_t b = 0; b < bins.size(); b++) {
            bool dup = false;
            for (size_t o = 0; o < b && !dup; o++) {
                dup = bins[o] == bins[b];
            }
            if (dup || bins[b] + lengths[idx] > capacity) {
                continue;
            }
            bins[b] += lengths[idx];
            self(self, idx + 1);
            bins[b] -= lengths[idx];
        }
        bins.push_back(lengths[idx]);
        self(self, idx + 1);
        bins.pop_back();
    };
    if (!lengths.empty()) {
        rec(rec, 0);
    } else {
        best = 0;
    }
    return best;
}

// ---- criterion 5 helper: conversation generator ---------------------------------

std::string random_text(rng & r, bool allow_newlines = true) {
    static const char * words[] = {"hello", "שלום", "data", "מודל", "x", "42", "תשובה", "ok"};
    std::string out;
    size_t n = r.bounded(6);
    for (size_t i = 0; i < n; i++) {
        if (i > 0) {
            out += (allow_newlines && r.bounded(4) == 0) ? "\n" : " ";
        }
        out += words[r.bounded(8)];
    }
    return out;
}

conversation random_conversation(rng & r) {
    conversation conv;
    conv.mode = r.bounded(2) == 0 ? chat_mode::thinking : chat_mode::instruct;
    size_t n = 1 + r.bounded(6);
    bool thinking_used = false;
    if (r.bounded(3) == 0) {
        conv.messages.push_back(msg(role::system, random_text(r)));
    }
    bool pending_tool_calls = false;
    for (size_t i = 0; i < n; i++) {
        if (pending_tool_calls && r.bounded(2) == 0) {
            conv.messages.push_back(msg(role::tool, random_text(r)));
            pending_tool_calls = false;
            continue;
        }
        pending_tool_calls = false;
        if (conv.messages.empty() || conv.messages.back().msg_role != role::user) {
            conv.messages.push_back(msg(role::user, random_text(r)));
        } else {
            message a = msg(role::assistant, random_text(r));
            if (conv.mode == chat_mode::thinking && r.bounded(2) == 0) {
                a.reasoning = random_text(r);
                thinking_used = true;
            }
            size_t calls = r.bounded(3);
            for (size_t c = 0; c < calls; c++) {
                a.tool_calls.push_back(json{
                    {"name", "tool" + std::to_string(r.bounded(3))},
                    {"arguments", {{"value", (int64_t) r.bounded(100)}, {"text", random_text(r, false)}}},
                });
            }
            pending_tool_calls = !a.tool_calls.empty();
            conv.messages.push_back(std::move(a));
        }
    }
    if (conv.mode == chat_mode::thinking && !thinking_used) {
        message a = msg(role::assistant, random_text(r));
        a.reasoning = random_text(r);
        if (conv.messages.back().msg_role != role::user) {
            conv.messages.push_back(msg(role::user, random_text(r)));
        }
        conv.messages.push_back(std::move(a));
    }
    return conv;
}

// ---- criterion 6 helper ----------------------------------------------------------

std::vector<std::string> nikud_sentences() {
    std::ifstream in(std::string(DICTA_TEST_DATA) + "/nikud_fixture.txt");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!trim(line).empty()) {
            lines.push_back(line);
        }
    }
    return lines;
}

std::string corrupt_word(const std::string & sentence, size_t idx) {
    auto words = split_words(sentence);
    words[idx] = "קלקול" + std::to_string(idx);
    std::string out;
    for (size_t i = 0; i < words.size(); i++) {
        out += (i ? " " : "") + words[i];
    }
    return out;
}

// value equality after wrapping the response in a think block
bool think_invariant(const reward_item & item, const std::string & response) {
    double bare = compute_reward(item, response).value;
    double wrapped = compute_reward(item, "<think>\nscratch work 0.0\n</think>\n\n" + response).value;
    return bare == wrapped;
}

} // namespace

// =================================================================================

static void criterion_pool_split(check_ctx & c) {
    auto docs = synthetic_corpus(1000, 41);
    auto split = split_pools(docs, 6144);
    c.expect(split.long_pool.size() + split.short_pool.size() == 1000, "partition loses documents");
    std::set<std::string> ids;
    for (const auto & d : split.long_pool) {
        c.expect(d.token_count > 6144, "long pool holds a short document");
        ids.insert(d.id);
    }
    for (const auto & d : split.short_pool) {
        c.expect(d.token_count <= 6144, "short pool holds a long document");
        ids.insert(d.id);
    }
    c.expect(ids.size() == 1000, "duplicate or missing ids across pools");
    bool boundary_in_short = false;
    for (const auto & d : split.short_pool) {
        boundary_in_short |= d.id == "doc0";  // token_count == 6144
    }
    c.expect(boundary_in_short, "boundary document (6144) not in the short pool");
}

static void criterion_mixture(check_ctx & c) {
    auto docs = synthetic_corpus(1000, 42);
    auto split = split_pools(docs, 6144);
    mixture_spec spec;
    spec.pool_weights = {{"long", 0.75}, {"short", 0.25}};
    spec.seed = 1234;
    // mean draw is ~0.75*13k + 0.25*3k tokens; size the budget for >= 10k draws
    spec.token_budget = 11000 * (3 * 13072 + 3072) / 4;
    auto a = sample_mixture(split, spec);
    c.expect(a.size() >= 10000, "fewer than 10,000 draws");
    size_t long_count = 0;
    for (const auto & d : a) {
        long_count += d.token_count > 6144;
    }
    double frac = (double) long_count / (double) a.size();
    c.expect(frac >= 0.739 && frac <= 0.761,
             "long-pool fraction " + std::to_string(frac) + " outside [0.739, 0.761]");

    auto b = sample_mixture(split, spec);
    c.expect(a.size() == b.size(), "same seed produced different draw counts");
    for (size_t i = 0; i < a.size() && i < b.size(); i++) {
        if (a[i].id != b[i].id) {
            c.expect(false, "same seed produced a different sequence");
            break;
        }
    }
}

static void criterion_ffd(check_ctx & c) {
    rng r(99);
    for (int trial = 0; trial < 500; trial++) {
        size_t n = 1 + r.bounded(12);
        size_t capacity = 20 + r.bounded(60);
        std::vector<pack_item> items;
        std::vector<size_t> lengths;
        size_t total = 0;
        for (size_t i = 0; i < n; i++) {
            size_t len = 1 + r.bounded(capacity);
            pack_item item;
            item.id = "i" + std::to_string(i);
            item.tokens.assign(len, 1);
            item.kind = pack_kind::pretrain;
            items.push_back(std::move(item));
            lengths.push_back(len);
            total += len;
        }
        auto seqs = pack_ffd(items, capacity);
        std::multiset<std::string> in_ids, out_ids;
        for (const auto & it : items) {
            in_ids.insert(it.id);
        }
        size_t packed = 0;
        for (const auto & s : seqs) {
            c.expect(s.token_ids.size() <= capacity, "sequence exceeds capacity");
            for (const auto & seg : s.segments) {
                out_ids.insert(seg.id);
                packed += seg.length;
            }
        }
        c.expect(in_ids == out_ids, "item multiset not preserved");
        c.expect(packed == total, "token totals differ after packing");
        size_t opt = optimal_bins(lengths, capacity);
        c.expect(seqs.size() >= opt, "FFD beat the exhaustive optimum (oracle bug)");
        c.expect(seqs.size() <= (11 * opt + 6) / 9, "FFD bound (11*OPT+6)/9 violated");
    }
}

static void criterion_loss_masks(check_ctx & c) {
    rng r(7);
    for (int i = 0; i < 1000; i++) {
        // random alternating role spans over a random length
        pack_item item;
        item.id = "conv" + std::to_string(i);
        size_t len = 2 + r.bounded(400);
        item.tokens.assign(len, 3);
        size_t pos = 0;
        size_t assistant_tokens = 0;
        bool assistant = false;
        while (pos < len) {
            size_t span = 1 + r.bounded(len - pos);
            item.role_spans.push_back({assistant ? "assistant" : "user", pos, pos + span});
            if (assistant) {
                assistant_tokens += span;
            }
            pos += span;
            assistant = !assistant;
        }
        auto mask = build_loss_mask(item);
        size_t ones = (size_t) std::count(mask.begin(), mask.end(), 1);
        c.expect(ones == assistant_tokens, "mask-1 count != assistant-span length");
    }

    pack_item pre;
    pre.id = "p";
    pre.tokens.assign(64, 1);
    pre.kind = pack_kind::pretrain;
    auto mask = build_loss_mask(pre);
    c.expect(std::count(mask.begin(), mask.end(), 1) == 64, "pretrain mask not all-ones");

    std::vector<pack_item> chat, pretrain;
    for (int i = 0; i < 20000; i++) {
        pack_item item;
        item.id = "c" + std::to_string(i);
        item.tokens.assign(500, 1);
        item.role_spans = {{"user", 0, 100}, {"assistant", 100, 500}};
        chat.push_back(std::move(item));
    }
    for (int i = 0; i < 200; i++) {
        pack_item item;
        item.id = "p" + std::to_string(i);
        item.tokens.assign(700, 1);
        item.kind = pack_kind::pretrain;
        pretrain.push_back(std::move(item));
    }
    auto mixed = mix_pretrain(chat, pretrain, 0.10, 11);
    size_t total = 0, pre_tokens = 0;
    for (const auto & it : mixed) {
        total += it.tokens.size();
        if (it.kind == pack_kind::pretrain) {
            pre_tokens += it.tokens.size();
        }
    }
    c.expect(total >= 1000000, "mixed stream under 1M tokens");
    double share = (double) pre_tokens / (double) total;
    c.expect(share >= 0.09 && share <= 0.11,
             "pretrain share " + std::to_string(share) + " outside [0.09, 0.11]");
}

static void criterion_template_roundtrip(check_ctx & c) {
    rng r(2024);
    for (int i = 0; i < 10000; i++) {
        conversation conv = random_conversation(r);
        conversation back = parse(render(conv));
        if (!(back == conv)) {
            c.expect(false, "round-trip mismatch at iteration " + std::to_string(i));
            return;
        }
        c.checks++;
    }
    for (auto tok : RESERVED_TOKENS) {
        conversation conv;
        conv.messages = {msg(role::user, "x " + std::string(tok) + " y")};
        bool rejected = false;
        try {
            render(conv);
        } catch (const std::exception &) {
            rejected = true;
        }
        c.expect(rejected, "reserved token accepted in content: " + std::string(tok));
    }
}

static void criterion_reward_scorers(check_ctx & c) {
    auto sentences = nikud_sentences();
    c.expect(sentences.size() == 5, "nikud fixture incomplete");

    // nikud: identity + all single and pair corruptions, exact expected values
    size_t nikud_cases = 0;
    for (const auto & s : sentences) {
        size_t n = split_words(s).size();
        reward_item item;
        item.id = "n";
        item.prompt.messages = {msg(role::user, strip_hebrew_marks(s))};
        item.task = reward_task::nikud;
        item.gold = s;

        auto run_case = [&](const std::string & hyp, double expected) {
            reward rew = compute_reward(item, hyp);
            c.expect(rew.value >= 0.0 && rew.value <= 1.0, "nikud reward out of [0,1]");
            c.expect(std::fabs(rew.value - expected) < 1e-12, "nikud exact value mismatch");
            c.expect(think_invariant(item, hyp), "nikud think-block invariance violated");
            nikud_cases++;
        };
        run_case(s, 1.0);
        for (size_t i = 0; i < n; i++) {
            run_case(corrupt_word(s, i), (double) (n - 1) / (double) n);
            for (size_t j = i + 1; j < n; j++) {
                run_case(corrupt_word(corrupt_word(s, i), j), (double) (n - 2) / (double) n);
            }
        }
    }
    c.expect(nikud_cases >= 50, "fewer than 50 nikud cases");

    // ud: field-level flips on fixture + synthetic sentences, exact values
    auto ud_golds = parse_conllu(read_file(std::string(DICTA_TEST_DATA) + "/ud_fixture.conllu"));
    dep_parse synth;
    for (size_t i = 0; i < 6; i++) {
        dep_word w;
        w.form = "w" + std::to_string(i);
        w.upos = i % 2 ? "NOUN" : "VERB";
        w.head = i == 0 ? 0 : i;
        w.deprel = i == 0 ? "root" : "dep";
        synth.words.push_back(w);
    }
    ud_golds.push_back(synth);
    size_t ud_cases = 0;
    for (const auto & gold : ud_golds) {
        double total = 3.0 * (double) gold.words.size();
        reward_item item;
        item.id = "u";
        item.prompt.messages = {msg(role::user, "parse")};
        item.task = reward_task::ud_parse;
        item.gold = dep_parse_to_conllu(gold);

        auto run_case = [&](const dep_parse & hyp, double expected) {
            std::string hyp_text = dep_parse_to_conllu(hyp);
            reward rew = compute_reward(item, hyp_text);
            c.expect(rew.value >= 0.0 && rew.value <= 1.0, "ud reward out of [0,1]");
            c.expect(std::fabs(rew.value - expected) < 1e-12, "ud exact value mismatch");
            c.expect(think_invariant(item, hyp_text), "ud think-block invariance violated");
            ud_cases++;
        };
        run_case(gold, 1.0);
        for (size_t i = 0; i < gold.words.size(); i++) {
            dep_parse h1 = gold;
            h1.words[i].upos = "XXX";
            run_case(h1, (total - 1.0) / total);
            dep_parse h2 = gold;
            h2.words[i].deprel = "zzz";
            run_case(h2, (total - 1.0) / total);
            dep_parse h3 = gold;
            h3.words[i].form = "___";
            run_case(h3, (total - 3.0) / total);
            dep_parse h4 = gold;
            h4.words[i].upos = "XXX";
            h4.words[i].deprel = "zzz";
            run_case(h4, (total - 2.0) / total);
        }
    }
    c.expect(ud_cases >= 50, "fewer than 50 ud cases");

    // constraints: golden table over the shipped verifier inventory
    struct cgold {
        const char * id;
        const char * params;
        const char * response;
        double expected;
    };
    static const cgold ctable[] = {
        {"no_uppercase", "{}", "all lower 123.", 1}, {"no_uppercase", "{}", "One capital", 0},
        {"no_uppercase", "{}", "עברית בלבד", 1}, {"no_uppercase", "{}", "", 1},
        {"all_uppercase", "{}", "SHOUTING 42!", 1}, {"all_uppercase", "{}", "SHOUTINg", 0},
        {"all_uppercase", "{}", "1234", 0}, {"all_uppercase", "{}", "ABC עברית", 1},
        {"min_words", R"({"n": 3})", "one two three", 1}, {"min_words", R"({"n": 3})", "one two", 0},
        {"min_words", R"({"n": 3})", "one two three four", 1}, {"min_words", R"({"n": 1})", "", 0},
        {"max_words", R"({"n": 3})", "one two three", 1}, {"max_words", R"({"n": 3})", "one two three four", 0},
        {"max_words", R"({"n": 3})", "", 1}, {"max_words", R"({"n": 0})", "word", 0},
        {"exact_words", R"({"n": 2})", "שתי מילים", 1}, {"exact_words", R"({"n": 2})", "שלוש מילים כאן", 0},
        {"exact_words", R"({"n": 2})", "אחת", 0}, {"exact_words", R"({"n": 0})", "  ", 1},
        {"include_keyword", R"({"keyword": "ירושלים"})", "העיר ירושלים יפה", 1},
        {"include_keyword", R"({"keyword": "ירושלים"})", "העיר חיפה יפה", 0},
        {"include_keyword", R"({"keyword": "cat"})", "concatenate", 1},
        {"include_keyword", R"({"keyword": "cat"})", "", 0},
        {"exclude_keyword", R"({"keyword": "אבל"})", "הכל טוב", 1},
        {"exclude_keyword", R"({"keyword": "אבל"})", "טוב אבל לא מושלם", 0},
        {"exclude_keyword", R"({"keyword": "x"})", "", 1},
        {"exclude_keyword", R"({"keyword": "אבל"})", "אבל", 0},
        {"starts_with", R"({"text": "ובכן,"})", "ובכן, התשובה היא", 1},
        {"starts_with", R"({"text": "ובכן,"})", "  ובכן, מרווח", 1},
        {"starts_with", R"({"text": "ובכן,"})", "התשובה ובכן,", 0},
        {"starts_with", R"({"text": "ובכן,"})", "", 0},
        {"ends_with", R"({"text": "סוף."})", "וזה סוף.", 1},
        {"ends_with", R"({"text": "סוף."})", "וזה סוף. \n", 1},
        {"ends_with", R"({"text": "סוף."})", "סוף. לא ממש", 0},
        {"ends_with", R"({"text": "סוף."})", "", 0},
        {"paragraph_count", R"({"n": 3})", "a\n\nb\n\nc", 1},
        {"paragraph_count", R"({"n": 3})", "a\nstill a\n\n\nb\n\nc\n", 1},
        {"paragraph_count", R"({"n": 3})", "a\n\nb", 0},
        {"paragraph_count", R"({"n": 1})", "one paragraph\ntwo lines", 1},
        {"all_hebrew_script", "{}", "שלום, עולם! 123", 1}, {"all_hebrew_script", "{}", "שלום world", 0},
        {"all_hebrew_script", "{}", "123 ...", 0}, {"all_hebrew_script", "{}", "ABC", 0},
        {"all_latin_script", "{}", "hello world 42", 1}, {"all_latin_script", "{}", "hello שלום", 0},
        {"all_latin_script", "{}", "?!", 0}, {"all_latin_script", "{}", "עברית", 0},
        {"valid_json", "{}", R"({"a": [1, 2]})", 1}, {"valid_json", "{}", R"(  {"a": 1}  )", 1},
        {"valid_json", "{}", R"({"a": )", 0}, {"valid_json", "{}", "not json", 0},
        {"numbered_list", R"({"n": 3})", "1. a\n2. b\n3. c", 1},
        {"numbered_list", R"({"n": 3})", "1. a\n\n2. b\n3. c\n", 1},
        {"numbered_list", R"({"n": 3})", "1. a\n3. b\n2. c", 0},
        {"numbered_list", R"({"n": 3})", "1. a\n2. b", 0},
        {"numbered_list", R"({"n": 2})", "1. a\n2. b\n3. c", 0},
    };
    size_t constraint_cases = 0;
    for (const auto & g : ctable) {
        reward_item item;
        item.id = "c";
        item.prompt.messages = {msg(role::user, "x")};
        item.task = reward_task::ifeval;
        item.gold = {{"constraint_id", g.id}, {"params", json::parse(g.params)}};
        reward rew = compute_reward(item, g.response);
        c.expect(rew.value == g.expected, std::string("constraint case failed: ") + g.id);
        c.expect(rew.value >= 0.0 && rew.value <= 1.0, "constraint reward out of [0,1]");
        constraint_cases++;
    }
    c.expect(constraint_cases >= 50, "fewer than 50 constraint cases");

    // math: equivalence + extraction golden table
    struct mgold {
        const char * gold;
        const char * response;
        double expected;
    };
    static const mgold mtable[] = {
        {"42", "the result is \\boxed{42}", 1}, {"42", "the result is \\boxed{41}", 0},
        {"42", "42", 1}, {"42", "42.", 1}, {"42", "+42", 1}, {"42", "43", 0}, {"42", "42.0", 1},
        {"1/2", "0.5", 1}, {"0.5", "1/2", 1}, {"1/2", "2/4", 1}, {"1/2", "0.51", 0},
        {"-3/4", "-0.75", 1}, {"-3/4", "0.75", 0}, {"-3/4", "3/-4", 1},
        {"0", "0.0", 1}, {"0", "-0", 1}, {"0", "0/5", 1},
        {"1000", "1,000", 1}, {"1234567", "total: 1,234,567", 1},
        {"12.5", "$12.5", 1}, {"12.5", "25/2", 1}, {"0.125", "1/8", 1},
        {"2", "4/2", 1}, {"2", "4/3", 0}, {"7", "7!", 1}, {"7", "7?", 1},
        {"3.14", "3.140", 1}, {"3.14", "3.1400", 1}, {"3.14", "3.141", 0},
        {"-1", "x = -1.0", 1}, {"-1", "x = 1", 0},
        {"0.1", "1/10", 1}, {"0.1", ".1", 1}, {"-0.5", "-.5", 1},
        {"999999999999999999", "999999999999999999", 1},
        {"\\frac{1}{2}", "so \\boxed{\\frac{1}{2}}", 1},
        {"3/4", "first \\boxed{1/2} then \\boxed{3/4}", 1},
        {"20", "First 10 then the result is 20.", 1},
        {"7", "the values (3, 5, 7).", 1},
        {"1200", "costs $1,200 total", 1},
        {"3.5", "about 3.5 units", 1},
        {"7", "no numbers at all", 0},
        {"42", "42. That is the answer.", 1},
        {"1000", "The budget is $1,000.", 1},
        {"5", "2 apples and 3 oranges make 5", 1},
        {"2", "2 apples and 3 oranges make 5", 0},
        {"1/3", "0.333", 0}, {"1/3", "1/3", 1}, {"1/3", "2/6", 1}, {"1/3", "-1/-3", 1},
        {"6", "3! = 6", 1},
    };
    size_t math_cases = 0;
    for (const auto & g : mtable) {
        reward_item item;
        item.id = "m";
        item.prompt.messages = {msg(role::user, "solve")};
        item.task = reward_task::math;
        item.gold = g.gold;
        reward rew = compute_reward(item, g.response);
        c.expect(rew.value == g.expected,
                 std::string("math case failed: gold=") + g.gold + " response=" + g.response);
        c.expect(think_invariant(item, g.response), "math think-block invariance violated");
        math_cases++;
    }
    c.expect(math_cases >= 50, "fewer than 50 math cases");

    // monotonicity: fixing one wrong word never lowers the nikud score
    rng r(314);
    for (int trial = 0; trial < 1000; trial++) {
        const std::string & gold = sentences[r.bounded(sentences.size())];
        size_t n = split_words(gold).size();
        std::vector<size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        r.shuffle(order);
        size_t k = 1 + r.bounded(n);
        std::string broken = gold;
        for (size_t i = 0; i < k; i++) {
            broken = corrupt_word(broken, order[i]);
        }
        // fix one corrupted word
        std::string repaired = broken;
        auto gold_words = split_words(gold);
        auto rep_words = split_words(repaired);
        rep_words[order[k - 1]] = gold_words[order[k - 1]];
        repaired.clear();
        for (size_t i = 0; i < rep_words.size(); i++) {
            repaired += (i ? " " : "") + rep_words[i];
        }
        double before = score_nikud(gold, broken).value;
        double after = score_nikud(gold, repaired).value;
        c.expect(after >= before, "fixing a word lowered the nikud score");
    }
}

static void criterion_eval_harness(check_ctx & c) {
    fallback_tokenizer tok;

    // echo-gold mock yields exactly 100.0 on trivia, winograd, nikud
    auto sentences = nikud_sentences();
    std::map<std::string, std::string> gold_by_prompt;
    auto make_task = [&](eval_task_name name) {
        eval_task task;
        task.name = name;
        for (int i = 0; i < 5; i++) {
            eval_item item;
            item.id = eval_task_label(name) + std::to_string(i);
            std::string prompt = item.id + " prompt";
            item.prompt.messages = {msg(role::user, prompt)};
            if (name == eval_task_name::nikud) {
                item.gold = sentences[(size_t) i];
            } else if (name == eval_task_name::winograd) {
                item.gold = "אפשרות" + std::to_string(i);
                item.options = {*item.gold, "אחרת" + std::to_string(i)};
            } else {
                item.gold = "תשובה" + std::to_string(i);
            }
            gold_by_prompt[prompt] = *item.gold;
            task.items.push_back(item);
        }
        return task;
    };
    mock_client echo("echo", [&gold_by_prompt](const std::vector<message> & msgs) {
        return gold_by_prompt.at(msgs.back().content);
    });
    for (auto name : {eval_task_name::trivia, eval_task_name::winograd, eval_task_name::nikud}) {
        auto result = run_task(make_task(name), echo, nullptr, tok);
        c.expect(result.aggregate == 100.0, "echo-gold aggregate != 100.0 on " + eval_task_label(name));
        c.expect(result.valid && result.unscored.empty(), "echo-gold run not fully scored");
    }

    // scripted judge: verdicts {win, tie, loss, win} -> 62.5 to 1e-9
    eval_task judged;
    judged.name = eval_task_name::summarization;
    for (int i = 0; i < 4; i++) {
        eval_item item;
        item.id = "s" + std::to_string(i);
        item.prompt.messages = {msg(role::user, "p" + std::to_string(i))};
        item.reference = "reference summary";
        judged.items.push_back(item);
    }
    mock_client model("m", [](const std::vector<message> & msgs) {
        return "candidate for " + std::string(msgs.back().content);
    });
    mock_client judge("j", [](const std::vector<message> & msgs) -> std::string {
        const std::string & t = msgs[0].content;
        if (t.find("p1") != std::string::npos) {
            return "TIE";
        }
        bool cand_is_a = t.find("Response A:\ncandidate") != std::string::npos;
        bool cand_wins = t.find("p2") == std::string::npos;  // p2 loses; p0, p3 win
        return (cand_wins == cand_is_a) ? "A" : "B";
    });
    auto result = run_task(judged, model, &judge, tok);
    c.expect(std::fabs(result.aggregate - 62.5) < 1e-9, "scripted verdicts do not aggregate to 62.5");

    // transcript replay byte-identical
    std::string path = (fs::temp_directory_path() / "dicta_acceptance_transcript.jsonl").string();
    std::remove(path.c_str());
    std::vector<message> req = {msg(role::user, "שאלה לדוגמה")};
    std::string live;
    {
        auto inner = std::make_shared<mock_client>("model-a", [](const std::vector<message> &) {
            return std::string("תשובה מוקלטת");
        });
        transcript log;
        recording_client rec(inner, &log);
        live = rec.complete(req);
        log.save(path);
    }
    transcript loaded = transcript::load(path);
    replay_client replay("model-a", &loaded);
    c.expect(replay.complete(req) == live, "replayed response differs from the recording");
    std::remove(path.c_str());
}

static void criterion_preferences(check_ctx & c) {
    std::vector<preference_pair> pairs;
    for (int i = 0; i < 1000; i++) {
        preference_pair p;
        p.prompt.messages = {msg(role::user, "question " + std::to_string(i))};
        p.chosen = msg(role::assistant, "good answer " + std::to_string(i));
        p.rejected = msg(role::assistant, "bad answer " + std::to_string(i));
        pairs.push_back(std::move(p));
    }
    mock_client model("gen", [](const std::vector<message> & msgs) {
        return "onpolicy " + msgs[0].content;
    });
    mock_client judge("j", [](const std::vector<message> &) { return std::string("TIE"); });
    auto out = onpolicy_inject(pairs, 0.15, model, judge, 5);
    c.expect(out.size() == 1000, "pair count changed");
    size_t onpolicy = 0;
    for (const auto & p : out) {
        onpolicy += p.origin == pair_origin::onpolicy;
        c.expect(p.chosen.content != p.rejected.content, "degenerate pair emitted");
    }
    c.expect(onpolicy == 150, "on-policy count " + std::to_string(onpolicy) + " != 150");

    // stickiness pairs never contain the directive
    stickiness_options opts;
    std::vector<conversation> prompts;
    for (int i = 0; i < 50; i++) {
        conversation conv;
        conv.messages = {msg(role::user, "שאלה " + std::to_string(i))};
        message call = msg(role::assistant, "בודק");
        call.tool_calls = {json{{"name", "f"}, {"arguments", json::object()}}};
        conv.messages.push_back(call);
        conv.messages.push_back(msg(role::tool, "data " + std::to_string(i)));
        prompts.push_back(std::move(conv));
    }
    mock_client sticky_model("m", [&opts](const std::vector<message> & msgs) {
        bool directed = msgs.back().content == opts.directive_he;
        return std::string(directed ? "תשובה בעברית" : "answer in English");
    });
    auto sticky = gen_language_stickiness(prompts, sticky_model, language::he, opts);
    c.expect(sticky.size() == 50, "stickiness pairs lost without cause");
    for (const auto & p : sticky) {
        c.expect(p.chosen.content != p.rejected.content, "degenerate stickiness pair");
        for (const auto & m : p.prompt.messages) {
            c.expect(m.content.find(opts.directive_he) == std::string::npos,
                     "stickiness directive leaked into an emitted prompt");
        }
    }
}

static void criterion_end_to_end(check_ctx & c) {
    fs::path base = fs::temp_directory_path() / "dicta_acceptance_e2e";
    fs::remove_all(base);
    fs::create_directories(base);

    // ~10MB corpus: long documents (> threshold in tokens) plus short ones
    fs::path corpus = base / "corpus.jsonl";
    {
        rng r(17);
        static const char * words[] = {"alpha", "beta", "gamma", "delta", "שלום", "עולם", "נתונים", "דוגמה"};
        std::ofstream out(corpus);
        auto gen_text = [&](size_t n_words) {
            std::string text;
            for (size_t w = 0; w < n_words; w++) {
                if (w) {
                    text += " ";
                }
                text += words[r.bounded(8)];
            }
            return text;
        };
        for (int i = 0; i < 180; i++) {
            out << json{{"id", "long" + std::to_string(i)}, {"text", gen_text(6500 + r.bounded(2000))},
                        {"language", i % 2 ? "he" : "en"}}.dump() << "\n";
        }
        for (int i = 0; i < 2500; i++) {
            out << json{{"id", "short" + std::to_string(i)}, {"text", gen_text(100 + r.bounded(400))},
                        {"language", i % 2 ? "he" : "en"}}.dump() << "\n";
        }
    }
    c.expect(fs::file_size(corpus) >= 9 * 1000 * 1000, "fixture corpus under ~10MB");

    auto run = [&](const std::string & args) {
        std::string cmd = std::string(DICTA_BIN) + " " + args + " > /dev/null";
        int rc = std::system(cmd.c_str());
        c.expect(rc == 0, "command failed: " + args);
        return rc == 0;
    };

    fallback_tokenizer tok;
    for (const std::string run_name : {"run1", "run2"}) {
        fs::path dir = base / run_name;
        fs::create_directories(dir);
        std::string d = dir.string() + "/";
        if (!run("split --input " + corpus.string() + " --out-long " + d + "long.jsonl --out-short " +
                 d + "short.jsonl --threshold 6144")) {
            return;
        }
        if (!run("sample --input " + corpus.string() + " --output " + d + "sampled.jsonl --threshold 6144"
                 " --long-weight 0.75 --short-weight 0.25 --budget 2000000 --seed 7")) {
            return;
        }
        // sampled documents -> pack items (whole-document pretrain items)
        {
            std::ifstream in(d + "sampled.jsonl");
            std::ofstream out(d + "items.jsonl");
            std::string line;
            size_t idx = 0;
            while (std::getline(in, line)) {
                if (trim(line).empty()) {
                    continue;
                }
                json doc = json::parse(line);
                out << json{{"id", doc.at("id").get<std::string>() + "#" + std::to_string(idx++)},
                            {"tokens", tok.encode(doc.at("text").get<std::string>())},
                            {"kind", "pretrain"}}.dump() << "\n";
            }
        }
        if (!run("pack --input " + d + "items.jsonl --output " + d + "packed.jsonl --capacity 65280")) {
            return;
        }
        // a rendered sample of conversations derived from the corpus
        {
            std::ofstream out(d + "convs.jsonl");
            rng r(3);
            for (int i = 0; i < 50; i++) {
                conversation conv;
                conv.messages = {msg(role::user, "שאלה מספר " + std::to_string(i)),
                                 msg(role::assistant, "תשובה מספר " + std::to_string(i))};
                out << conversation_to_json(conv).dump() << "\n";
            }
        }
        if (!run("render --input " + d + "convs.jsonl --output " + d + "rendered.txt")) {
            return;
        }
    }

    // same seeds => byte-identical outputs and matching manifest digests
    for (const std::string name : {"long.jsonl", "short.jsonl", "sampled.jsonl", "packed.jsonl", "rendered.txt"}) {
        std::string a = read_file((base / "run1" / name).string());
        std::string b = read_file((base / "run2" / name).string());
        c.expect(!a.empty(), name + " is empty");
        c.expect(a == b, name + " differs between identically-seeded runs");
    }
    for (const std::string name : {"sampled.jsonl", "packed.jsonl", "rendered.txt"}) {
        json m1 = json::parse(read_file((base / "run1" / name).string() + ".manifest.json"));
        json m2 = json::parse(read_file((base / "run2" / name).string() + ".manifest.json"));
        c.expect(m1.at("seed") == m2.at("seed"), "manifest seeds differ");
        std::vector<uint64_t> d1, d2;
        for (const auto & [_, v] : m1.at("outputs").items()) {
            d1.push_back(v.get<uint64_t>());
        }
        for (const auto & [_, v] : m2.at("outputs").items()) {
            d2.push_back(v.get<uint64_t>());
        }
        c.expect(d1 == d2, "manifest output digests differ for " + name);
    }
    fs::remove_all(base);
}

int main() {
    run_criterion(1, "pool split", 5.0, criterion_pool_split);
    run_criterion(2, "mixture sampling", 10.0, criterion_mixture);
    run_criterion(3, "ffd packing vs oracle", 60.0, criterion_ffd);
    run_criterion(4, "loss masks", 60.0, criterion_loss_masks);
    run_criterion(5, "template round-trip", 60.0, criterion_template_roundtrip);
    run_criterion(6, "reward scorers", 60.0, criterion_reward_scorers);
    run_criterion(7, "eval harness", 60.0, criterion_eval_harness);
    run_criterion(8, "preference construction", 60.0, criterion_preferences);
    run_criterion(9, "end-to-end smoke", 60.0, criterion_end_to_end);

    if (failures > 0) {
        std::printf("%d criterion(s) FAILED\n", failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
