#include "dicta/packing.hpp"

#include <algorithm>
#include <numeric>

namespace dicta {

using json = nlohmann::json;

void pack_item::validate() const {
    size_t pos = 0;
    for (const auto & span : role_spans) {
        if (span.begin != pos || span.end <= span.begin || span.end > tokens.size()) {
            throw std::runtime_error("item " + id + ": malformed role spans");
        }
        pos = span.end;
    }
    if (!role_spans.empty() && pos != tokens.size()) {
        throw std::runtime_error("item " + id + ": role spans do not cover the token sequence");
    }
    if (kind == pack_kind::chat && role_spans.empty() && !tokens.empty()) {
        throw std::runtime_error("item " + id + ": chat item without role spans");
    }
}

std::vector<packed_sequence> pack_ffd(const std::vector<pack_item> & items, size_t capacity) {
    for (const auto & item : items) {
        if (item.tokens.size() > capacity) {
            throw std::runtime_error("item " + item.id + " has " + std::to_string(item.tokens.size()) +
                                     " tokens, exceeding capacity " + std::to_string(capacity));
        }
    }
    std::vector<size_t> order(items.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (items[a].tokens.size() != items[b].tokens.size()) {
            return items[a].tokens.size() > items[b].tokens.size();
        }
        return items[a].id < items[b].id;
    });

    std::vector<packed_sequence> sequences;
    for (size_t idx : order) {
        const pack_item & item = items[idx];
        packed_sequence * target = nullptr;
        for (auto & seq : sequences) {
            if (seq.remaining() >= item.tokens.size()) {
                target = &seq;
                break;
            }
        }
        if (target == nullptr) {
            sequences.emplace_back();
            sequences.back().capacity = capacity;
            target = &sequences.back();
        }
        std::vector<uint8_t> mask = build_loss_mask(item);
        target->segments.push_back({item.id, target->token_ids.size(), item.tokens.size()});
        target->token_ids.insert(target->token_ids.end(), item.tokens.begin(), item.tokens.end());
        target->loss_mask.insert(target->loss_mask.end(), mask.begin(), mask.end());
    }
    return sequences;
}

std::vector<uint8_t> build_loss_mask(const pack_item & item) {
    item.validate();
    if (item.kind == pack_kind::pretrain) {
        return std::vector<uint8_t>(item.tokens.size(), 1);
    }
    std::vector<uint8_t> mask(item.tokens.size(), 0);
    for (const auto & span : item.role_spans) {
        if (span.role == "assistant") {
            std::fill(mask.begin() + span.begin, mask.begin() + span.end, 1);
        }
    }
    return mask;
}

std::vector<pack_item> mix_pretrain(const std::vector<pack_item> & chat_items,
                                    const std::vector<pack_item> & pretrain_items,
                                    double fraction, uint64_t seed) {
    if (fraction < 0.0 || fraction >= 1.0) {
        throw std::runtime_error("mix_pretrain: fraction must be in [0, 1)");
    }
    if (fraction == 0.0) {
        return chat_items;
    }
    if (pretrain_items.empty()) {
        throw std::runtime_error("mix_pretrain: fraction > 0 with empty pretrain stream");
    }

    auto mean_len = [](const std::vector<pack_item> & items) {
        size_t total = 0;
        for (const auto & it : items) {
            total += it.tokens.size();
        }
        return items.empty() ? 1.0 : std::max(1.0, (double) total / (double) items.size());
    };
    double mc = mean_len(chat_items);
    double mp = mean_len(pretrain_items);
    // insertion probability q such that q*mp / (q*mp + (1-q)*mc) == fraction
    double q = fraction * mc / (fraction * mc + (1.0 - fraction) * mp);

    rng r(seed);
    std::vector<pack_item> out;
    out.reserve(chat_items.size());
    size_t pre_idx = 0;
    for (const auto & chat : chat_items) {
        while (r.uniform() < q) {
            out.push_back(pretrain_items[pre_idx % pretrain_items.size()]);
            pre_idx++;
        }
        out.push_back(chat);
    }
    return out;
}

json packed_sequence_to_json(const packed_sequence & seq) {
    json segments = json::array();
    for (const auto & s : seq.segments) {
        segments.push_back({{"id", s.id}, {"offset", s.offset}, {"length", s.length}});
    }
    return {
        {"token_ids", seq.token_ids},
        {"loss_mask", seq.loss_mask},
        {"segments", std::move(segments)},
    };
}

packed_sequence packed_sequence_from_json(const json & j, size_t capacity) {
    packed_sequence seq;
    seq.capacity = capacity;
    seq.token_ids = j.at("token_ids").get<std::vector<int64_t>>();
    seq.loss_mask = j.at("loss_mask").get<std::vector<uint8_t>>();
    for (const auto & s : j.at("segments")) {
        seq.segments.push_back({
            s.at("id").get<std::string>(),
            s.at("offset").get<size_t>(),
            s.at("length").get<size_t>(),
        });
    }
    if (seq.token_ids.size() > capacity || seq.loss_mask.size() != seq.token_ids.size()) {
        throw std::runtime_error("packed sequence violates capacity/mask invariants");
    }
    return seq;
}

} // namespace dicta
