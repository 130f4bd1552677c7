#pragma once

// Transliteration between Devanagari (UTF-8), ITRANS and SLP1, plus phoneme
// and sandhi-type classification on SLP1 text.
//
// SLP1 is the internal representation everywhere: one ASCII character per
// phoneme. Whitespace and '+' pass through every codec unchanged so that
// corpus lines can be converted whole.

#include <string>
#include <string_view>

namespace sandhi {

enum class PhonemeClass { Vowel, Consonant, Visarga, Anusvara, Other };
enum class SandhiType { Swara, Vyanjana, Visarga };

std::string_view to_string(PhonemeClass c);
std::string_view to_string(SandhiType t);

/// Total over all chars; anything outside the SLP1 inventory is Other.
PhonemeClass classify_phoneme(char c) noexcept;

bool is_slp1_char(char c) noexcept;
bool is_vowel(char c) noexcept;

/// True when `word` is nonempty and every char is an SLP1 phoneme symbol.
bool is_slp1_word(std::string_view word) noexcept;

/// Throws Error{UnknownCodePoint, position} (position counts code points) for
/// characters outside the Devanagari block, whitespace, '+' and danda marks;
/// Error{InvalidSequence} for a dependent vowel sign or virama with no
/// consonant to attach to, or malformed UTF-8.
std::string devanagari_to_slp1(std::string_view utf8);

/// Inverse of devanagari_to_slp1 on its image. Input chars outside the SLP1
/// inventory (other than whitespace, '+', '.') raise UnknownToken.
std::string slp1_to_devanagari(std::string_view slp1);

/// Greedy longest-match ITRANS tokenizer. Throws Error{UnknownToken, byte}.
std::string itrans_to_slp1(std::string_view itrans);

/// Visarga if w1 ends in 'H', Swara if the junction is vowel+vowel, Vyanjana
/// otherwise. Throws Error{EmptyWord}.
SandhiType classify_sandhi_type(std::string_view w1, std::string_view w2);

/// SLP1 phoneme inventory in canonical order (vowels, consonants, M, H, ~, ').
std::string_view slp1_inventory() noexcept;

}  // namespace sandhi
