#pragma once

#include "dicta/util.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace dicta {

enum class pack_kind { chat, pretrain };

struct role_span {
    std::string role;  // "system" | "user" | "assistant" | "tool"
    size_t begin = 0;  // half-open [begin, end)
    size_t end   = 0;

    bool operator==(const role_span &) const = default;
};

struct pack_item {
    std::string          id;
    std::vector<int64_t> tokens;
    std::vector<role_span> role_spans;  // disjoint, sorted, cover [0, len)
    pack_kind kind = pack_kind::chat;

    void validate() const;
};

struct packed_segment {
    std::string id;
    size_t offset = 0;
    size_t length = 0;
};

struct packed_sequence {
    size_t capacity = 0;
    std::vector<packed_segment> segments;
    std::vector<int64_t> token_ids;
    std::vector<uint8_t> loss_mask;  // 0/1 per token

    size_t remaining() const { return capacity - token_ids.size(); }
};

// First-fit-decreasing: items sorted by length descending (ties by id
// ascending), each placed into the first sequence with room, else a new one.
// Throws if any item is longer than capacity.
std::vector<packed_sequence> pack_ffd(const std::vector<pack_item> & items, size_t capacity);

// kind=chat: 1 exactly on assistant spans; kind=pretrain: all 1.
std::vector<uint8_t> build_loss_mask(const pack_item & item);

// Seeded interleave targeting `fraction` pretrain tokens of the total.
// Pretrain items cycle when exhausted; output ends with the chat stream.
std::vector<pack_item> mix_pretrain(const std::vector<pack_item> & chat_items,
                                    const std::vector<pack_item> & pretrain_items,
                                    double fraction, uint64_t seed);

// JSONL record: {token_ids, loss_mask, segments:[{id, offset, length}]}
nlohmann::json packed_sequence_to_json(const packed_sequence & seq);
packed_sequence packed_sequence_from_json(const nlohmann::json & j, size_t capacity);

} // namespace dicta
