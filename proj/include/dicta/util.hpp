#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dicta {

// Deterministic RNG. splitmix64 with a Lemire-style bounded draw so that
// seeded streams are bit-identical across platforms and standard libraries.
struct rng {
    uint64_t state;

    explicit rng(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, n)
    uint64_t bounded(uint64_t n) {
        if (n == 0) {
            throw std::invalid_argument("rng::bounded: n must be > 0");
        }
        unsigned __int128 m = (unsigned __int128) next() * n;
        uint64_t lo = (uint64_t) m;
        if (lo < n) {
            uint64_t t = -n % n;
            while (lo < t) {
                m = (unsigned __int128) next() * n;
                lo = (uint64_t) m;
            }
        }
        return (uint64_t) (m >> 64);
    }

    // uniform in [0, 1)
    double uniform() {
        return (next() >> 11) * 0x1.0p-53;
    }

    template <typename T>
    void shuffle(std::vector<T> & v) {
        for (size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[bounded(i)]);
        }
    }
};

// FNV-1a 64-bit. Used for transcript keys, manifests, and fallback token ids.
inline uint64_t fnv1a(std::string_view data, uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string trim(std::string_view s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) {
        return "";
    }
    size_t e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline bool starts_with(std::string_view s, std::string_view prefix) {
    return s.size() >= prefix.size() && s.substr(0, prefix.size()) == prefix;
}

inline bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::vector<std::string> split_words(std::string_view text);

// UTF-8 <-> codepoints. Invalid bytes decode to U+FFFD.
std::vector<uint32_t> utf8_decode(std::string_view s);
std::string           utf8_encode(const std::vector<uint32_t> & cps);

// Raised by model clients; `retryable` distinguishes transport failures
// from permanent rejections.
struct client_error : std::runtime_error {
    bool retryable;
    explicit client_error(const std::string & msg, bool retryable_ = true)
        : std::runtime_error(msg), retryable(retryable_) {}
};

// Per-item failure inside a streaming operation; the stream continues.
struct item_error {
    size_t      index;   // record / line number, 0-based
    std::string message;
};

} // namespace dicta
