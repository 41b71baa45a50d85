#pragma once

#include <string>
#include <string_view>

namespace dicta {

// Composed-form normalization for Hebrew text: canonical decomposition of the
// Hebrew presentation-forms block (U+FB1D..U+FB4E canonical entries) followed
// by canonical reordering of combining marks (U+0591..U+05C7) by combining
// class. Hebrew has no canonical recompositions, so this agrees with NFC on
// Hebrew text. Non-Hebrew codepoints pass through unchanged.
std::string normalize_hebrew(std::string_view text);

// Removes Hebrew points and cantillation marks (U+0591..U+05C7), leaving the
// bare consonantal text. Presentation forms are decomposed first.
std::string strip_hebrew_marks(std::string_view text);

// Fraction of letter codepoints in the given script; non-letter codepoints
// (digits, punctuation, spaces) are ignored. Returns 0 when there are no
// letters.
double hebrew_letter_share(std::string_view text);
double latin_letter_share(std::string_view text);

bool is_hebrew_letter(uint32_t cp);   // U+05D0..U+05EA and presentation forms
bool is_latin_letter(uint32_t cp);

// Entirely-in-script checks used by constraint verifiers: every letter
// codepoint belongs to the script, and at least one letter is present.
bool all_letters_hebrew(std::string_view text);
bool all_letters_latin(std::string_view text);

} // namespace dicta
