#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace dicta {

// Id-producing, deterministic tokenizer interface. Real deployments plug in
// the training tokenizer; the shipped fallback splits on whitespace and
// punctuation and hashes each piece to a stable id.
struct tokenizer {
    virtual ~tokenizer() = default;

    virtual std::vector<int64_t> encode(std::string_view text) const = 0;

    size_t count(std::string_view text) const { return encode(text).size(); }
};

// Whitespace + punctuation fallback used by tests and fixtures.
struct fallback_tokenizer : tokenizer {
    std::vector<int64_t> encode(std::string_view text) const override;
};

std::shared_ptr<tokenizer> make_fallback_tokenizer();

} // namespace dicta
