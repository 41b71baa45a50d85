#include "dicta/hebrew.hpp"

#include "dicta/util.hpp"

#include <algorithm>
#include <cstdint>
#include <vector>

namespace dicta {

// Canonical decompositions of the Hebrew presentation-forms block.
// FB20..FB29 and FB4F are compatibility-only and intentionally absent.
struct presentation_decomp {
    uint32_t cp;
    uint32_t out[3];  // zero-terminated
};

static const presentation_decomp PRESENTATION_TABLE[] = {
    {0xFB1D, {0x05D9, 0x05B4, 0}}, {0xFB1F, {0x05F2, 0x05B7, 0}},
    {0xFB2A, {0x05E9, 0x05C1, 0}}, {0xFB2B, {0x05E9, 0x05C2, 0}},
    {0xFB2C, {0x05E9, 0x05BC, 0x05C1}}, {0xFB2D, {0x05E9, 0x05BC, 0x05C2}},
    {0xFB2E, {0x05D0, 0x05B7, 0}}, {0xFB2F, {0x05D0, 0x05B8, 0}},
    {0xFB30, {0x05D0, 0x05BC, 0}}, {0xFB31, {0x05D1, 0x05BC, 0}},
    {0xFB32, {0x05D2, 0x05BC, 0}}, {0xFB33, {0x05D3, 0x05BC, 0}},
    {0xFB34, {0x05D4, 0x05BC, 0}}, {0xFB35, {0x05D5, 0x05BC, 0}},
    {0xFB36, {0x05D6, 0x05BC, 0}}, {0xFB38, {0x05D8, 0x05BC, 0}},
    {0xFB39, {0x05D9, 0x05BC, 0}}, {0xFB3A, {0x05DA, 0x05BC, 0}},
    {0xFB3B, {0x05DB, 0x05BC, 0}}, {0xFB3C, {0x05DC, 0x05BC, 0}},
    {0xFB3E, {0x05DE, 0x05BC, 0}}, {0xFB40, {0x05E0, 0x05BC, 0}},
    {0xFB41, {0x05E1, 0x05BC, 0}}, {0xFB43, {0x05E3, 0x05BC, 0}},
    {0xFB44, {0x05E4, 0x05BC, 0}}, {0xFB46, {0x05E6, 0x05BC, 0}},
    {0xFB47, {0x05E7, 0x05BC, 0}}, {0xFB48, {0x05E8, 0x05BC, 0}},
    {0xFB49, {0x05E9, 0x05BC, 0}}, {0xFB4A, {0x05EA, 0x05BC, 0}},
    {0xFB4B, {0x05D5, 0x05B9, 0}}, {0xFB4C, {0x05D1, 0x05BF, 0}},
    {0xFB4D, {0x05DB, 0x05BF, 0}}, {0xFB4E, {0x05E4, 0x05BF, 0}},
};

// Canonical combining classes of the Hebrew points and marks.
static int combining_class(uint32_t cp) {
    switch (cp) {
        case 0x05B0: return 10;  // sheva
        case 0x05B1: return 11;  // hataf segol
        case 0x05B2: return 12;  // hataf patah
        case 0x05B3: return 13;  // hataf qamats
        case 0x05B4: return 14;  // hiriq
        case 0x05B5: return 15;  // tsere
        case 0x05B6: return 16;  // segol
        case 0x05B7: return 17;  // patah
        case 0x05B8: return 18;  // qamats
        case 0x05B9: return 19;  // holam
        case 0x05BA: return 19;  // holam haser for vav
        case 0x05BB: return 20;  // qubuts
        case 0x05BC: return 21;  // dagesh
        case 0x05BD: return 22;  // meteg
        case 0x05BF: return 23;  // rafe
        case 0x05C1: return 24;  // shin dot
        case 0x05C2: return 25;  // sin dot
        case 0x05C7: return 18;  // qamats qatan
        case 0x05C4: return 230; // upper dot
        case 0x05C5: return 220; // lower dot
        default: break;
    }
    if (cp >= 0x0591 && cp <= 0x05AF) {
        // cantillation marks; 220/230 per mark, coarse split by typical position
        static const uint8_t cc[] = {
            220, 230, 230, 230, 230, 220, 230, 230, 230, 222, // 0591-059A
            220, 230, 230, 230, 230, 230, 230, 230, 230, 230, // 059B-05A4
            220, 230, 230, 230, 230, 220, 230, 230, 220, 230, // 05A5-05AE
            230,                                              // 05AF
        };
        return cc[cp - 0x0591];
    }
    return 0;
}

std::string normalize_hebrew(std::string_view text) {
    std::vector<uint32_t> cps = utf8_decode(text);
    std::vector<uint32_t> out;
    out.reserve(cps.size());
    for (uint32_t cp : cps) {
        if (cp >= 0xFB1D && cp <= 0xFB4E) {
            const auto * entry = std::find_if(std::begin(PRESENTATION_TABLE), std::end(PRESENTATION_TABLE),
                                              [cp](const presentation_decomp & d) { return d.cp == cp; });
            if (entry != std::end(PRESENTATION_TABLE)) {
                for (int i = 0; i < 3 && entry->out[i]; i++) {
                    out.push_back(entry->out[i]);
                }
                continue;
            }
        }
        out.push_back(cp);
    }
    // canonical ordering: stable sort of each maximal nonzero-ccc run
    size_t i = 0;
    while (i < out.size()) {
        if (combining_class(out[i]) == 0) {
            i++;
            continue;
        }
        size_t j = i;
        while (j < out.size() && combining_class(out[j]) != 0) {
            j++;
        }
        std::stable_sort(out.begin() + i, out.begin() + j,
                         [](uint32_t a, uint32_t b) { return combining_class(a) < combining_class(b); });
        i = j;
    }
    return utf8_encode(out);
}

std::string strip_hebrew_marks(std::string_view text) {
    std::vector<uint32_t> cps = utf8_decode(normalize_hebrew(text));
    std::vector<uint32_t> out;
    out.reserve(cps.size());
    for (uint32_t cp : cps) {
        if (cp >= 0x0591 && cp <= 0x05C7 && combining_class(cp) != 0) {
            continue;
        }
        out.push_back(cp);
    }
    return utf8_encode(out);
}

bool is_hebrew_letter(uint32_t cp) {
    return (cp >= 0x05D0 && cp <= 0x05EA) || (cp >= 0x05F0 && cp <= 0x05F2) ||
           (cp >= 0xFB1D && cp <= 0xFB4F);
}

bool is_latin_letter(uint32_t cp) {
    return (cp >= 'A' && cp <= 'Z') || (cp >= 'a' && cp <= 'z') ||
           (cp >= 0x00C0 && cp <= 0x024F && cp != 0x00D7 && cp != 0x00F7);
}

static bool is_any_letter(uint32_t cp) {
    // coarse: any non-ASCII-symbol alphabetic range we care about, plus
    // general letters from other scripts (anything >= 0x370 that is not a
    // combining mark or punctuation block we know about)
    if (is_hebrew_letter(cp) || is_latin_letter(cp)) {
        return true;
    }
    if (cp >= 0x0591 && cp <= 0x05C7) {
        return false;  // Hebrew marks
    }
    if (cp < 0x80) {
        return false;  // remaining ASCII: digits, punctuation, space
    }
    if (cp >= 0x2000 && cp <= 0x206F) {
        return false;  // general punctuation
    }
    return cp >= 0x0370;  // other scripts count as letters
}

static double letter_share(std::string_view text, bool (*pred)(uint32_t)) {
    size_t letters = 0;
    size_t matched = 0;
    for (uint32_t cp : utf8_decode(text)) {
        if (is_any_letter(cp)) {
            letters++;
            if (pred(cp)) {
                matched++;
            }
        }
    }
    return letters == 0 ? 0.0 : (double) matched / (double) letters;
}

double hebrew_letter_share(std::string_view text) {
    return letter_share(text, is_hebrew_letter);
}

double latin_letter_share(std::string_view text) {
    return letter_share(text, is_latin_letter);
}

static bool all_letters_in(std::string_view text, bool (*pred)(uint32_t)) {
    size_t letters = 0;
    for (uint32_t cp : utf8_decode(text)) {
        if (is_any_letter(cp)) {
            letters++;
            if (!pred(cp)) {
                return false;
            }
        }
    }
    return letters > 0;
}

bool all_letters_hebrew(std::string_view text) {
    return all_letters_in(text, is_hebrew_letter);
}

bool all_letters_latin(std::string_view text) {
    return all_letters_in(text, is_latin_letter);
}

} // namespace dicta
