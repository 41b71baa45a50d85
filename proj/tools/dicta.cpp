// dicta: data-engineering, verifiable-reward, and evaluation toolkit CLI.

#include "dicta/datapipe.hpp"
#include "dicta/evalbench.hpp"
#include "dicta/packing.hpp"
#include "dicta/prefmix.hpp"
#include "dicta/rewards.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

using json = nlohmann::json;
using namespace dicta;

namespace {

struct run_config {
    size_t   capacity    = 65280;
    size_t   threshold   = 6144;
    size_t   token_budget = 1000000;
    uint64_t seed        = 0;
    double   long_weight  = 0.75;
    double   short_weight = 0.25;
    double   he_weight    = -1;  // <0 = language dimension off
    double   en_weight    = -1;
    double   fraction     = 0.0;
    int      workers      = 1;
    std::string model_endpoint;
    std::string judge_endpoint;
    std::string model_name;
    std::string judge_name = "judge";
    std::string auth_env   = "DICTA_API_TOKEN";
    double      temperature = 0.0;
    int         max_tokens  = 2048;

    json to_json() const {
        return {
            {"capacity", capacity}, {"threshold", threshold}, {"token_budget", token_budget},
            {"seed", seed}, {"long_weight", long_weight}, {"short_weight", short_weight},
            {"he_weight", he_weight}, {"en_weight", en_weight}, {"fraction", fraction},
            {"workers", workers}, {"model_endpoint", model_endpoint}, {"judge_endpoint", judge_endpoint},
            {"model_name", model_name}, {"judge_name", judge_name}, {"auth_env", auth_env},
            {"temperature", temperature}, {"max_tokens", max_tokens},
        };
    }
};

void load_config_file(const std::string & path, run_config & cfg) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config file: " + path);
    }
    std::string line;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') {
            continue;
        }
        size_t eq = t.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("bad config line: " + line);
        }
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if      (key == "capacity")      cfg.capacity = std::stoull(value);
        else if (key == "threshold")     cfg.threshold = std::stoull(value);
        else if (key == "token_budget")  cfg.token_budget = std::stoull(value);
        else if (key == "seed")          cfg.seed = std::stoull(value);
        else if (key == "long_weight")   cfg.long_weight = std::stod(value);
        else if (key == "short_weight")  cfg.short_weight = std::stod(value);
        else if (key == "he_weight")     cfg.he_weight = std::stod(value);
        else if (key == "en_weight")     cfg.en_weight = std::stod(value);
        else if (key == "fraction")      cfg.fraction = std::stod(value);
        else if (key == "workers")       cfg.workers = std::stoi(value);
        else if (key == "model_endpoint") cfg.model_endpoint = value;
        else if (key == "judge_endpoint") cfg.judge_endpoint = value;
        else if (key == "model_name")    cfg.model_name = value;
        else if (key == "judge_name")    cfg.judge_name = value;
        else if (key == "auth_env")      cfg.auth_env = value;
        else if (key == "temperature")   cfg.temperature = std::stod(value);
        else if (key == "max_tokens")    cfg.max_tokens = std::stoi(value);
        else {
            throw std::runtime_error("unknown config key: " + key);
        }
    }
}

uint64_t file_digest(const std::string & path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return fnv1a(ss.str());
}

// machine-readable manifest written beside the primary output
void write_manifest(const std::string & out_path, const std::string & command, const run_config & cfg,
                    const std::vector<std::string> & inputs, const std::vector<std::string> & outputs,
                    const json & counts) {
    json manifest = {
        {"command", command},
        {"config", cfg.to_json()},
        {"config_hash", fnv1a(cfg.to_json().dump())},
        {"seed", cfg.seed},
        {"counts", counts},
    };
    json in_digests = json::object();
    for (const auto & p : inputs) {
        in_digests[p] = file_digest(p);
    }
    json out_digests = json::object();
    for (const auto & p : outputs) {
        out_digests[p] = file_digest(p);
    }
    manifest["inputs"] = std::move(in_digests);
    manifest["outputs"] = std::move(out_digests);
    std::ofstream out(out_path + ".manifest.json", std::ios::trunc);
    out << manifest.dump(2) << "\n";
}

json doc_to_json(const document & d) {
    return {
        {"id", d.id}, {"text", d.text}, {"language", language_name(d.lang)},
        {"source_tag", d.source_tag}, {"token_count", d.token_count},
    };
}

std::vector<document> read_docs(const std::string & path, const tokenizer & tok) {
    auto result = ingest_documents(path, ingest_format::jsonl, tok);
    for (const auto & e : result.errors) {
        std::cerr << path << ":" << e.index << ": " << e.message << "\n";
    }
    return result.documents;
}

void write_jsonl(const std::string & path, const std::vector<json> & records) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    for (const auto & r : records) {
        out << r.dump() << "\n";
    }
}

std::vector<json> read_jsonl(const std::string & path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::vector<json> records;
    std::string line;
    while (std::getline(in, line)) {
        if (!trim(line).empty()) {
            records.push_back(json::parse(line));
        }
    }
    return records;
}

std::string read_file(const std::string & path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> read_lines(const std::string & path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!trim(line).empty()) {
            lines.push_back(line);
        }
    }
    return lines;
}

pack_item pack_item_from_json(const json & j) {
    pack_item item;
    item.id = j.at("id").get<std::string>();
    item.tokens = j.at("tokens").get<std::vector<int64_t>>();
    item.kind = j.value("kind", "chat") == std::string("pretrain") ? pack_kind::pretrain : pack_kind::chat;
    for (const auto & s : j.value("role_spans", json::array())) {
        item.role_spans.push_back({
            s.at("role").get<std::string>(),
            s.at("begin").get<size_t>(),
            s.at("end").get<size_t>(),
        });
    }
    item.validate();
    return item;
}

std::shared_ptr<model_client> make_client(const run_config & cfg, const std::string & endpoint,
                                          const std::string & name, const std::string & replay_path,
                                          transcript & log) {
    if (!replay_path.empty()) {
        log = transcript::load(replay_path);
        return std::make_shared<replay_client>(name, &log);
    }
    if (endpoint.empty()) {
        throw std::runtime_error("no endpoint or transcript configured for client '" + name + "'");
    }
    client_params params;
    params.model = name;
    params.temperature = cfg.temperature;
    params.max_tokens = cfg.max_tokens;
    return std::make_shared<http_client>(endpoint, cfg.auth_env, params);
}

} // namespace

int main(int argc, char ** argv) {
    CLI::App app{"Deterministic LLM post-training data toolkit: corpus mixing, packing, chat templates, verifiable rewards, preference pairs, and a Hebrew chat benchmark harness"};
    app.require_subcommand(1);

    run_config cfg;
    std::string config_path;
    app.add_option("--config", config_path, "key = value config file; flags override it");

    // shared option values
    std::string input, output, second_input, gold_path, hyp_path, schemas_path;
    std::string task_name, constraint_id, params_json, constraints_path;
    std::string math_path, nikud_path, ud_path, transcript_path, judge_transcript_path;
    size_t sample_n = 0;

    auto add_common = [&](CLI::App * cmd) {
        cmd->add_option("--seed", cfg.seed, "RNG seed (all randomness flows from explicit seeds)");
        cmd->add_option("--workers", cfg.workers, "bounded worker count (default 1 for determinism)");
    };

    auto * split_cmd = app.add_subcommand("split", "partition documents into long/short pools by token count");
    split_cmd->add_option("--input", input, "documents JSONL")->required();
    split_cmd->add_option("--out-long", output, "long-pool output JSONL")->required();
    std::string out_short;
    split_cmd->add_option("--out-short", out_short, "short-pool output JSONL")->required();
    split_cmd->add_option("--threshold", cfg.threshold, "pool boundary in tokens (default 6144)");
    add_common(split_cmd);

    auto * sample_cmd = app.add_subcommand("sample", "seeded mixture sampling over pools and languages");
    sample_cmd->add_option("--input", input, "documents JSONL")->required();
    sample_cmd->add_option("--output", output, "sampled documents JSONL")->required();
    sample_cmd->add_option("--threshold", cfg.threshold, "pool boundary in tokens");
    sample_cmd->add_option("--long-weight", cfg.long_weight, "long-pool probability (default 0.75)");
    sample_cmd->add_option("--short-weight", cfg.short_weight, "short-pool probability (default 0.25)");
    sample_cmd->add_option("--he-weight", cfg.he_weight, "Hebrew probability (omit to ignore language)");
    sample_cmd->add_option("--en-weight", cfg.en_weight, "English probability");
    sample_cmd->add_option("--budget", cfg.token_budget, "token budget");
    add_common(sample_cmd);

    auto * pack_cmd = app.add_subcommand("pack", "first-fit-decreasing packing with loss masks");
    pack_cmd->add_option("--input", input, "pack items JSONL")->required();
    pack_cmd->add_option("--output", output, "packed sequences JSONL")->required();
    pack_cmd->add_option("--capacity", cfg.capacity, "sequence capacity in tokens (default 65280)");
    pack_cmd->add_option("--pretrain", second_input, "pretrain items JSONL to mix in");
    pack_cmd->add_option("--fraction", cfg.fraction, "pretrain token-share target (default 0)");
    add_common(pack_cmd);

    auto * render_cmd = app.add_subcommand("render", "render conversations to the chat-template surface form");
    render_cmd->add_option("--input", input, "conversations JSONL")->required();
    render_cmd->add_option("--output", output, "rendered text output")->required();

    auto * parse_cmd = app.add_subcommand("parse", "parse rendered chat-template text back to a conversation");
    parse_cmd->add_option("--input", input, "rendered text file")->required();
    parse_cmd->add_option("--output", output, "conversation JSONL output")->required();

    auto * validate_cmd = app.add_subcommand("validate-tools", "validate tool-call payloads against schemas");
    validate_cmd->add_option("--input", input, "conversations JSONL")->required();
    validate_cmd->add_option("--schemas", schemas_path, "tool schema JSON file")->required();

    auto * score_cmd = app.add_subcommand("score", "run a reward scorer over gold/hypothesis files");
    score_cmd->add_option("--task", task_name, "nikud | math | ifeval | ud_parse")->required();
    score_cmd->add_option("--gold", gold_path, "gold file (text lines or CoNLL-U)");
    score_cmd->add_option("--hyp", hyp_path, "hypothesis file")->required();
    score_cmd->add_option("--constraint", constraint_id, "ifeval: constraint id");
    score_cmd->add_option("--params", params_json, "ifeval: verifier parameters as JSON");

    auto * rewards_cmd = app.add_subcommand("build-rewards", "assemble the verifiable-reward dataset");
    rewards_cmd->add_option("--prompts", input, "SFT prompts JSONL (ifeval source)");
    rewards_cmd->add_option("--constraints", constraints_path, "constraint inventory JSON");
    rewards_cmd->add_option("--math", math_path, "math items JSONL {prompt, gold}");
    rewards_cmd->add_option("--nikud", nikud_path, "nikud gold corpus, one sentence per line");
    rewards_cmd->add_option("--ud", ud_path, "UD gold corpus in CoNLL-U");
    rewards_cmd->add_option("--output", output, "reward items JSONL")->required();
    add_common(rewards_cmd);

    auto * prefs_cmd = app.add_subcommand("build-prefs", "filter/sample preference pairs and inject on-policy pairs");
    prefs_cmd->add_option("--input", input, "preference pairs JSONL")->required();
    prefs_cmd->add_option("--output", output, "output pairs JSONL")->required();
    prefs_cmd->add_option("--n", sample_n, "sample size after the English filter")->required();
    prefs_cmd->add_option("--fraction", cfg.fraction, "on-policy fraction (0 disables injection)");
    prefs_cmd->add_option("--model-endpoint", cfg.model_endpoint, "generation endpoint");
    prefs_cmd->add_option("--judge-endpoint", cfg.judge_endpoint, "judge endpoint");
    prefs_cmd->add_option("--transcript", transcript_path, "replay transcript for the model client");
    prefs_cmd->add_option("--judge-transcript", judge_transcript_path, "replay transcript for the judge");
    add_common(prefs_cmd);

    auto * eval_cmd = app.add_subcommand("eval", "run one benchmark task");
    eval_cmd->add_option("--task", task_name, "summarization | translation | trivia | winograd | nikud")->required();
    eval_cmd->add_option("--items", input, "eval items JSONL")->required();
    eval_cmd->add_option("--output", output, "result JSON")->required();
    eval_cmd->add_option("--model-endpoint", cfg.model_endpoint, "test model endpoint");
    eval_cmd->add_option("--judge-endpoint", cfg.judge_endpoint, "judge endpoint (judge tasks only)");
    eval_cmd->add_option("--model-name", cfg.model_name, "model name for requests and the leaderboard");
    eval_cmd->add_option("--transcript", transcript_path, "replay transcript for the model client");
    eval_cmd->add_option("--judge-transcript", judge_transcript_path, "replay transcript for the judge");
    add_common(eval_cmd);

    auto * report_cmd = app.add_subcommand("report", "emit a leaderboard row from task results");
    std::vector<std::string> result_paths;
    report_cmd->add_option("--results", result_paths, "result JSON files")->required();
    std::string model_label = "model";
    report_cmd->add_option("--model-name", model_label, "row label");
    report_cmd->add_option("--output", output, "write CSV here as well");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError & e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);  // --help
        }
        app.exit(e);
        return 2;
    }

    try {
        if (!config_path.empty()) {
            // config file fills in every option the user did not pass as a flag
            run_config file_cfg = cfg;
            load_config_file(config_path, file_cfg);
            auto * sub = app.get_subcommands()[0];
            auto passed = [&](const std::string & name) {
                auto * o = sub->get_option_no_throw(name);
                return o != nullptr && o->count() > 0;
            };
            if (!passed("--threshold"))   cfg.threshold = file_cfg.threshold;
            if (!passed("--capacity"))    cfg.capacity = file_cfg.capacity;
            if (!passed("--budget"))      cfg.token_budget = file_cfg.token_budget;
            if (!passed("--seed"))        cfg.seed = file_cfg.seed;
            if (!passed("--long-weight")) cfg.long_weight = file_cfg.long_weight;
            if (!passed("--short-weight")) cfg.short_weight = file_cfg.short_weight;
            if (!passed("--he-weight"))   cfg.he_weight = file_cfg.he_weight;
            if (!passed("--en-weight"))   cfg.en_weight = file_cfg.en_weight;
            if (!passed("--fraction"))    cfg.fraction = file_cfg.fraction;
            if (!passed("--workers"))     cfg.workers = file_cfg.workers;
            if (!passed("--model-endpoint")) cfg.model_endpoint = file_cfg.model_endpoint;
            if (!passed("--judge-endpoint")) cfg.judge_endpoint = file_cfg.judge_endpoint;
            if (!passed("--model-name"))  cfg.model_name = file_cfg.model_name;
        }

        auto tok = make_fallback_tokenizer();

        if (split_cmd->parsed()) {
            auto docs = read_docs(input, *tok);
            auto split = split_pools(std::move(docs), cfg.threshold);
            std::vector<json> long_records, short_records;
            for (const auto & d : split.long_pool)  long_records.push_back(doc_to_json(d));
            for (const auto & d : split.short_pool) short_records.push_back(doc_to_json(d));
            write_jsonl(output, long_records);
            write_jsonl(out_short, short_records);
            write_manifest(output, "split", cfg, {input}, {output, out_short},
                           {{"long", split.long_pool.size()}, {"short", split.short_pool.size()}});
            std::cout << "long=" << split.long_pool.size() << " short=" << split.short_pool.size() << "\n";
        } else if (sample_cmd->parsed()) {
            auto docs = read_docs(input, *tok);
            auto split = split_pools(std::move(docs), cfg.threshold);
            mixture_spec spec;
            spec.pool_weights = {{"long", cfg.long_weight}, {"short", cfg.short_weight}};
            if (cfg.he_weight >= 0 || cfg.en_weight >= 0) {
                spec.language_weights = {{language::he, std::max(cfg.he_weight, 0.0)},
                                         {language::en, std::max(cfg.en_weight, 0.0)}};
            }
            spec.token_budget = cfg.token_budget;
            spec.seed = cfg.seed;
            auto sampled = sample_mixture(split, spec);
            std::vector<json> records;
            for (const auto & d : sampled) records.push_back(doc_to_json(d));
            write_jsonl(output, records);
            write_manifest(output, "sample", cfg, {input}, {output}, {{"sampled", sampled.size()}});
            std::cout << "sampled=" << sampled.size() << "\n";
        } else if (pack_cmd->parsed()) {
            std::vector<pack_item> items;
            for (const auto & j : read_jsonl(input)) items.push_back(pack_item_from_json(j));
            std::vector<std::string> inputs = {input};
            if (!second_input.empty() && cfg.fraction > 0) {
                std::vector<pack_item> pretrain;
                for (const auto & j : read_jsonl(second_input)) pretrain.push_back(pack_item_from_json(j));
                items = mix_pretrain(items, pretrain, cfg.fraction, cfg.seed);
                inputs.push_back(second_input);
            }
            auto sequences = pack_ffd(items, cfg.capacity);
            std::vector<json> records;
            for (const auto & s : sequences) records.push_back(packed_sequence_to_json(s));
            write_jsonl(output, records);
            write_manifest(output, "pack", cfg, inputs, {output},
                           {{"items", items.size()}, {"sequences", sequences.size()}});
            std::cout << "sequences=" << sequences.size() << "\n";
        } else if (render_cmd->parsed()) {
            std::ofstream out(output, std::ios::trunc);
            size_t n = 0;
            for (const auto & j : read_jsonl(input)) {
                out << render(conversation_from_json(j));
                n++;
            }
            out.close();
            write_manifest(output, "render", cfg, {input}, {output}, {{"conversations", n}});
        } else if (parse_cmd->parsed()) {
            conversation conv = parse(read_file(input));
            write_jsonl(output, {conversation_to_json(conv)});
            write_manifest(output, "parse", cfg, {input}, {output}, {{"messages", conv.messages.size()}});
        } else if (validate_cmd->parsed()) {
            auto schemas = load_tool_schemas(json::parse(read_file(schemas_path)));
            bool all_ok = true;
            for (const auto & j : read_jsonl(input)) {
                auto report = validate_tool_calls(conversation_from_json(j), schemas);
                for (const auto & c : report.checks) {
                    if (!c.ok) {
                        std::cout << "message " << c.message_index << " call " << c.call_index
                                  << ": " << c.reason << "\n";
                    }
                }
                all_ok = all_ok && report.passed;
            }
            std::cout << (all_ok ? "all tool calls pass" : "validation failures found") << "\n";
            return all_ok ? 0 : 1;
        } else if (score_cmd->parsed()) {
            double aggregate = 0.0;
            if (task_name == "nikud") {
                auto gold = read_lines(gold_path);
                auto hyp = read_lines(hyp_path);
                if (gold.size() != hyp.size()) {
                    throw std::runtime_error("gold/hyp line counts differ");
                }
                double sum = 0;
                for (size_t i = 0; i < gold.size(); i++) {
                    sum += score_nikud(gold[i], hyp[i]).value;
                }
                aggregate = gold.empty() ? 0.0 : 100.0 * sum / (double) gold.size();
            } else if (task_name == "math") {
                auto gold = read_lines(gold_path);
                auto hyp = read_lines(hyp_path);
                if (gold.size() != hyp.size()) {
                    throw std::runtime_error("gold/hyp line counts differ");
                }
                double sum = 0;
                for (size_t i = 0; i < gold.size(); i++) {
                    sum += score_math(gold[i], hyp[i]).value;
                }
                aggregate = gold.empty() ? 0.0 : 100.0 * sum / (double) gold.size();
            } else if (task_name == "ifeval") {
                json params = params_json.empty() ? json::object() : json::parse(params_json);
                double sum = 0;
                auto hyp = read_lines(hyp_path);
                for (const auto & line : hyp) {
                    sum += verify_constraint(constraint_id, params, line).value;
                }
                aggregate = hyp.empty() ? 0.0 : 100.0 * sum / (double) hyp.size();
            } else if (task_name == "ud_parse") {
                auto gold = parse_conllu(read_file(gold_path));
                auto hyp = parse_conllu(read_file(hyp_path));
                if (gold.size() != hyp.size()) {
                    throw std::runtime_error("gold/hyp sentence counts differ");
                }
                double sum = 0;
                for (size_t i = 0; i < gold.size(); i++) {
                    sum += score_ud(gold[i], hyp[i]).value;
                }
                aggregate = gold.empty() ? 0.0 : 100.0 * sum / (double) gold.size();
            } else {
                throw std::runtime_error("unknown score task: " + task_name);
            }
            std::cout.setf(std::ios::fixed);
            std::cout.precision(4);
            std::cout << "aggregate=" << aggregate << "\n";
        } else if (rewards_cmd->parsed()) {
            std::vector<conversation> prompts;
            constraint_set constraints;
            std::vector<std::string> inputs;
            if (!input.empty()) {
                for (const auto & j : read_jsonl(input)) prompts.push_back(conversation_from_json(j));
                inputs.push_back(input);
            }
            if (!constraints_path.empty()) {
                constraints = constraint_set::load(constraints_path);
                inputs.push_back(constraints_path);
            }
            std::vector<std::pair<conversation, std::string>> math_items;
            if (!math_path.empty()) {
                for (const auto & j : read_jsonl(math_path)) {
                    math_items.emplace_back(conversation_from_json(j.at("prompt")),
                                            j.at("gold").get<std::string>());
                }
                inputs.push_back(math_path);
            }
            std::vector<std::string> nikud_gold;
            if (!nikud_path.empty()) {
                nikud_gold = read_lines(nikud_path);
                inputs.push_back(nikud_path);
            }
            std::vector<std::pair<conversation, dep_parse>> ud_items;
            if (!ud_path.empty()) {
                for (const auto & parse : parse_conllu(read_file(ud_path))) {
                    conversation c;
                    message m;
                    m.msg_role = role::user;
                    for (const auto & w : parse.words) {
                        if (!m.content.empty()) m.content += " ";
                        m.content += w.form;
                    }
                    c.messages.push_back(std::move(m));
                    ud_items.emplace_back(std::move(c), parse);
                }
                inputs.push_back(ud_path);
            }
            auto items = build_reward_dataset(prompts, constraints, math_items, nikud_gold, ud_items, cfg.seed);
            std::vector<json> records;
            for (const auto & it : items) records.push_back(reward_item_to_json(it));
            write_jsonl(output, records);
            write_manifest(output, "build-rewards", cfg, inputs, {output}, {{"items", items.size()}});
            std::cout << "items=" << items.size() << "\n";
        } else if (prefs_cmd->parsed()) {
            std::vector<preference_pair> pairs;
            for (const auto & j : read_jsonl(input)) pairs.push_back(preference_pair_from_json(j));
            auto sampled = filter_and_sample(pairs, sample_n, cfg.seed);
            if (cfg.fraction > 0) {
                transcript model_log, judge_log;
                auto model = make_client(cfg, cfg.model_endpoint, cfg.model_name.empty() ? "model" : cfg.model_name,
                                         transcript_path, model_log);
                auto judge = make_client(cfg, cfg.judge_endpoint, cfg.judge_name, judge_transcript_path, judge_log);
                sampled = onpolicy_inject(sampled, cfg.fraction, *model, *judge, cfg.seed + 1);
            }
            std::vector<json> records;
            for (const auto & p : sampled) records.push_back(preference_pair_to_json(p));
            write_jsonl(output, records);
            write_manifest(output, "build-prefs", cfg, {input}, {output}, {{"pairs", sampled.size()}});
            std::cout << "pairs=" << sampled.size() << "\n";
        } else if (eval_cmd->parsed()) {
            eval_task task;
            task.name = eval_task_from_label(task_name);
            task.items = load_eval_items(input);
            bool needs_judge = scoring_for(task.name) == eval_scoring::judge_winrate;
            if (needs_judge && cfg.judge_endpoint.empty() && judge_transcript_path.empty()) {
                throw std::runtime_error("task " + task_name + " requires a judge (set --judge-endpoint or --judge-transcript)");
            }
            transcript model_log, judge_log;
            auto model = make_client(cfg, cfg.model_endpoint, cfg.model_name.empty() ? "model" : cfg.model_name,
                                     transcript_path, model_log);
            std::shared_ptr<model_client> judge;
            if (needs_judge) {
                judge = make_client(cfg, cfg.judge_endpoint, cfg.judge_name, judge_transcript_path, judge_log);
            }
            auto result = run_task(task, *model, judge.get(), *tok);
            std::ofstream out(output, std::ios::trunc);
            out << result.to_json().dump(2) << "\n";
            out.close();
            write_manifest(output, "eval", cfg, {input}, {output},
                           {{"scored", result.per_item.size()}, {"unscored", result.unscored.size()}});
            std::cout << "task=" << result.task << " aggregate=" << result.aggregate
                      << " valid=" << (result.valid ? "yes" : "no") << "\n";
            if (!result.valid) {
                return 1;
            }
        } else if (report_cmd->parsed()) {
            std::vector<eval_result> results;
            for (const auto & path : result_paths) {
                json j = json::parse(read_file(path));
                eval_result r;
                r.task = j.at("task").get<std::string>();
                r.aggregate = j.at("aggregate").get<double>();
                results.push_back(std::move(r));
            }
            auto row = emit_leaderboard(results, model_label);
            std::cout << row.text;
            if (!output.empty()) {
                std::ofstream out(output, std::ios::trunc);
                out << row.csv;
            }
        }
    } catch (const std::exception & e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
