#include "dicta/datapipe.hpp"

#include "dicta/hebrew.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace dicta {

using json = nlohmann::json;

void mixture_spec::validate() const {
    auto check_sum = [](double sum, const char * what) {
        if (std::fabs(sum - 1.0) > 1e-9) {
            throw std::runtime_error(std::string(what) + " weights sum to " + std::to_string(sum) + ", expected 1.0");
        }
    };
    if (!pool_weights.empty()) {
        double s = 0;
        for (const auto & [_, w] : pool_weights) {
            s += w;
        }
        check_sum(s, "pool");
    }
    if (!language_weights.empty()) {
        double s = 0;
        for (const auto & [_, w] : language_weights) {
            s += w;
        }
        check_sum(s, "language");
    }
    if (token_budget == 0) {
        throw std::runtime_error("token_budget must be > 0");
    }
}

ingest_result ingest_documents(const std::string & path, ingest_format format, const tokenizer & tok) {
    ingest_result result;
    if (format == ingest_format::jsonl) {
        std::ifstream in(path);
        if (!in) {
            throw std::runtime_error("cannot open " + path);
        }
        std::string line;
        size_t lineno = 0;
        while (std::getline(in, line)) {
            lineno++;
            if (trim(line).empty()) {
                continue;
            }
            try {
                json j = json::parse(line);
                document d;
                d.id = j.at("id").get<std::string>();
                d.text = j.at("text").get<std::string>();
                std::string lang = j.at("language").get<std::string>();
                if (lang != "he" && lang != "en") {
                    throw std::runtime_error("language must be he or en, got: " + lang);
                }
                d.lang = language_from_name(lang);
                d.source_tag = j.value("source_tag", "");
                d.token_count = tok.count(d.text);
                result.documents.push_back(std::move(d));
            } catch (const std::exception & e) {
                result.errors.push_back({lineno, e.what()});
            }
        }
        return result;
    }

    // plain_dir: one document per regular file, language by dominant script
    namespace fs = std::filesystem;
    if (!fs::is_directory(path)) {
        throw std::runtime_error("not a directory: " + path);
    }
    std::vector<fs::path> files;
    for (const auto & entry : fs::directory_iterator(path)) {
        if (entry.is_regular_file()) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    for (const auto & file : files) {
        std::ifstream in(file, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        document d;
        d.id = file.filename().string();
        d.text = ss.str();
        d.lang = hebrew_letter_share(d.text) >= 0.5 ? language::he : language::en;
        d.source_tag = path;
        d.token_count = tok.count(d.text);
        result.documents.push_back(std::move(d));
    }
    return result;
}

pool_split split_pools(std::vector<document> docs, size_t threshold) {
    if (threshold == 0) {
        throw std::runtime_error("threshold must be > 0");
    }
    pool_split split;
    split.threshold = threshold;
    for (auto & d : docs) {
        // boundary: token_count == threshold goes to the short pool
        if (d.token_count > threshold) {
            split.long_pool.push_back(std::move(d));
        } else {
            split.short_pool.push_back(std::move(d));
        }
    }
    return split;
}

namespace {

// without-replacement queue that falls back to with-replacement draws
struct bucket {
    std::vector<const document *> docs;
    std::vector<size_t> queue;  // shuffled indices, drawn from the back
    bool shuffled = false;

    const document * draw(rng & r) {
        if (!shuffled) {
            queue.resize(docs.size());
            for (size_t i = 0; i < queue.size(); i++) {
                queue[i] = i;
            }
            r.shuffle(queue);
            shuffled = true;
        }
        if (!queue.empty()) {
            size_t i = queue.back();
            queue.pop_back();
            return docs[i];
        }
        return docs[r.bounded(docs.size())];
    }
};

} // namespace

std::vector<document> sample_mixture(const pool_split & split, const mixture_spec & spec) {
    spec.validate();

    std::map<std::string, const std::vector<document> *> pools = {
        {"long", &split.long_pool},
        {"short", &split.short_pool},
    };
    for (const auto & [name, weight] : spec.pool_weights) {
        auto it = pools.find(name);
        if (it == pools.end()) {
            throw std::runtime_error("unknown pool: " + name);
        }
        if (weight > 0 && it->second->empty()) {
            throw std::runtime_error("pool '" + name + "' has weight > 0 but is empty");
        }
    }

    size_t weighted_tokens = 0;
    for (const auto & [name, weight] : spec.pool_weights) {
        if (weight > 0) {
            for (const auto & d : *pools[name]) {
                weighted_tokens += d.token_count;
            }
        }
    }
    if (weighted_tokens == 0) {
        throw std::runtime_error("all weighted pools contain zero tokens");
    }

    // buckets per (pool, language); language-less bucket per pool as fallback
    std::map<std::string, bucket> pool_buckets;
    std::map<std::pair<std::string, language>, bucket> lang_buckets;
    for (const auto & [name, docs] : pools) {
        for (const auto & d : *docs) {
            pool_buckets[name].docs.push_back(&d);
            lang_buckets[{name, d.lang}].docs.push_back(&d);
        }
    }

    rng r(spec.seed);
    auto pick_weighted = [&r](const auto & weights) {
        double u = r.uniform();
        double acc = 0;
        auto last = weights.begin();
        for (auto it = weights.begin(); it != weights.end(); ++it) {
            acc += it->second;
            if (u < acc) {
                return it->first;
            }
            if (it->second > 0) {
                last = it;
            }
        }
        return last->first;
    };

    std::vector<document> out;
    size_t tokens = 0;
    while (tokens < spec.token_budget) {
        std::string pool_name = pick_weighted(spec.pool_weights);
        const document * doc = nullptr;
        if (!spec.language_weights.empty()) {
            language lang = pick_weighted(spec.language_weights);
            auto it = lang_buckets.find({pool_name, lang});
            if (it != lang_buckets.end()) {
                doc = it->second.draw(r);
            }
        }
        if (doc == nullptr) {
            doc = pool_buckets[pool_name].draw(r);
        }
        tokens += doc->token_count;
        out.push_back(*doc);
    }
    return out;
}

double compression_ratio(const tokenizer & tok, const std::vector<document> & corpus) {
    if (corpus.empty()) {
        throw std::runtime_error("compression_ratio: empty corpus");
    }
    size_t tokens = 0;
    size_t words = 0;
    for (const auto & d : corpus) {
        tokens += tok.count(d.text);
        words += split_words(d.text).size();
    }
    if (words == 0) {
        throw std::runtime_error("compression_ratio: corpus contains no words");
    }
    return (double) tokens / (double) words;
}

std::map<language, double> compression_ratio_by_language(const tokenizer & tok, const std::vector<document> & corpus) {
    std::map<language, std::vector<document>> by_lang;
    for (const auto & d : corpus) {
        by_lang[d.lang].push_back(d);
    }
    std::map<language, double> out;
    for (const auto & [lang, docs] : by_lang) {
        out[lang] = compression_ratio(tok, docs);
    }
    return out;
}

conversation translate_conversation(const conversation & conv, model_client & client,
                                    const translate_options & opts) {
    if (conv.lang != language::en) {
        throw std::runtime_error("translate_conversation: source conversation must be English");
    }
    std::string request = opts.prompt + "\n\n";
    for (size_t i = 0; i < conv.messages.size(); i++) {
        if (i > 0) {
            request += "\n" + opts.turn_delimiter + "\n";
        }
        request += conv.messages[i].content;
    }
    message m;
    m.msg_role = role::user;
    m.content = request;
    std::string reply = client.complete({m});

    std::vector<std::string> pieces;
    size_t pos = 0;
    while (true) {
        size_t next = reply.find(opts.turn_delimiter, pos);
        if (next == std::string::npos) {
            pieces.push_back(trim(reply.substr(pos)));
            break;
        }
        pieces.push_back(trim(reply.substr(pos, next - pos)));
        pos = next + opts.turn_delimiter.size();
    }
    if (pieces.size() != conv.messages.size()) {
        throw translate_rejected("structure mismatch: expected " + std::to_string(conv.messages.size()) +
                                 " turns, got " + std::to_string(pieces.size()));
    }
    conversation out = conv;  // roles, reasoning, tool-call payloads preserved
    for (size_t i = 0; i < out.messages.size(); i++) {
        out.messages[i].content = pieces[i];
    }
    out.lang = language::he;
    return out;
}

double token_overlap(const tokenizer & tok, std::string_view a, std::string_view b) {
    std::vector<int64_t> ta = tok.encode(a);
    std::vector<int64_t> tb = tok.encode(b);
    if (ta.empty() && tb.empty()) {
        return 1.0;
    }
    if (ta.empty() || tb.empty()) {
        return 0.0;
    }
    std::map<int64_t, size_t> counts;
    for (int64_t t : ta) {
        counts[t]++;
    }
    size_t common = 0;
    for (int64_t t : tb) {
        auto it = counts.find(t);
        if (it != counts.end() && it->second > 0) {
            it->second--;
            common++;
        }
    }
    return (double) common / (double) std::max(ta.size(), tb.size());
}

bool degeneracy_filter(const tokenizer & tok, const conversation & src, const conversation & translated,
                       double overlap_threshold) {
    if (src.messages.size() != translated.messages.size()) {
        throw std::runtime_error("degeneracy_filter: turn count mismatch");
    }
    for (size_t i = 0; i < src.messages.size(); i++) {
        if (src.messages[i].msg_role != role::assistant) {
            continue;
        }
        const std::string & a = src.messages[i].content;
        const std::string & b = translated.messages[i].content;
        if (a == b) {
            return false;
        }
        if (token_overlap(tok, a, b) > overlap_threshold) {
            return false;
        }
    }
    return true;
}

std::vector<conv_template> load_templates(const std::string & path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open templates file: " + path);
    }
    std::vector<conv_template> templates;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) {
            continue;
        }
        json j = json::parse(line);
        conv_template t;
        if (j.contains("turns")) {
            for (const auto & turn : j["turns"]) {
                t.turns.emplace_back(role_from_name(turn.at("role").get<std::string>()),
                                     turn.at("text").get<std::string>());
            }
        } else {
            t.turns.emplace_back(role::user, j.at("user").get<std::string>());
            t.turns.emplace_back(role::assistant, j.at("assistant").get<std::string>());
        }
        templates.push_back(std::move(t));
    }
    return templates;
}

static std::string substitute(const std::string & tmpl, const json & record) {
    std::string out;
    size_t pos = 0;
    while (pos < tmpl.size()) {
        size_t open = tmpl.find('{', pos);
        if (open == std::string::npos) {
            out += tmpl.substr(pos);
            break;
        }
        size_t close = tmpl.find('}', open);
        if (close == std::string::npos) {
            out += tmpl.substr(pos);
            break;
        }
        out += tmpl.substr(pos, open - pos);
        std::string field = tmpl.substr(open + 1, close - open - 1);
        if (!record.contains(field)) {
            throw std::runtime_error("missing field: " + field);
        }
        const auto & v = record[field];
        out += v.is_string() ? v.get<std::string>() : v.dump();
        pos = close + 1;
    }
    return out;
}

templatize_result templatize_pairs(const std::vector<json> & records,
                                   const std::vector<conv_template> & templates, uint64_t seed) {
    if (templates.empty()) {
        throw std::runtime_error("templatize_pairs: empty template set");
    }
    templatize_result result;
    rng r(seed);
    for (size_t i = 0; i < records.size(); i++) {
        const conv_template & t = templates[r.bounded(templates.size())];
        try {
            conversation conv;
            for (const auto & [turn_role, text] : t.turns) {
                message m;
                m.msg_role = turn_role;
                m.content = substitute(text, records[i]);
                conv.messages.push_back(std::move(m));
            }
            conv.validate();
            result.conversations.push_back(std::move(conv));
        } catch (const std::exception & e) {
            result.errors.push_back({i, e.what()});
        }
    }
    return result;
}

conversation augment_system_directive(const conversation & conv, const std::string & directive) {
    conversation out = conv;
    if (!out.messages.empty() && out.messages[0].msg_role == role::system) {
        out.messages[0].content += "\n" + directive;
    } else {
        message m;
        m.msg_role = role::system;
        m.content = directive;
        out.messages.insert(out.messages.begin(), m);
    }
    return out;
}

} // namespace dicta
