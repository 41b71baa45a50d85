#include "dicta/tokenizer.hpp"

#include "dicta/util.hpp"

namespace dicta {

static bool is_ascii_punct(char c) {
    return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') ||
           (c >= '[' && c <= '`') || (c >= '{' && c <= '~');
}

std::vector<int64_t> fallback_tokenizer::encode(std::string_view text) const {
    std::vector<int64_t> ids;
    size_t i = 0;
    auto is_space = [](char c) {
        return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
    };
    auto emit = [&](std::string_view piece) {
        // top bit cleared so ids stay non-negative
        ids.push_back((int64_t) (fnv1a(piece) & 0x7fffffffffffffffULL));
    };
    while (i < text.size()) {
        char c = text[i];
        if (is_space(c)) {
            i++;
            continue;
        }
        if (is_ascii_punct(c)) {
            emit(text.substr(i, 1));
            i++;
            continue;
        }
        size_t start = i;
        while (i < text.size() && !is_space(text[i]) && !is_ascii_punct(text[i])) {
            i++;
        }
        emit(text.substr(start, i - start));
    }
    return ids;
}

std::shared_ptr<tokenizer> make_fallback_tokenizer() {
    return std::make_shared<fallback_tokenizer>();
}

} // namespace dicta
