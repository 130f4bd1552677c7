#include "sandhi/translit.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "sandhi/error.hpp"

namespace sandhi {
namespace {

struct VowelEntry {
  char slp1;
  char32_t independent;
  char32_t sign;  // 0 for the inherent 'a'
};

constexpr std::array<VowelEntry, 14> kVowels{{
    {'a', U'अ', 0},         {'A', U'आ', U'ा'},
    {'i', U'इ', U'ि'}, {'I', U'ई', U'ी'},
    {'u', U'उ', U'ु'}, {'U', U'ऊ', U'ू'},
    {'f', U'ऋ', U'ृ'}, {'F', U'ॠ', U'ॄ'},
    {'x', U'ऌ', U'ॢ'}, {'X', U'ॡ', U'ॣ'},
    {'e', U'ए', U'े'}, {'E', U'ऐ', U'ै'},
    {'o', U'ओ', U'ो'}, {'O', U'औ', U'ौ'},
}};

struct ConsonantEntry {
  char slp1;
  char32_t letter;
};

constexpr std::array<ConsonantEntry, 34> kConsonants{{
    {'k', U'क'}, {'K', U'ख'}, {'g', U'ग'}, {'G', U'घ'},
    {'N', U'ङ'}, {'c', U'च'}, {'C', U'छ'}, {'j', U'ज'},
    {'J', U'झ'}, {'Y', U'ञ'}, {'w', U'ट'}, {'W', U'ठ'},
    {'q', U'ड'}, {'Q', U'ढ'}, {'R', U'ण'}, {'t', U'त'},
    {'T', U'थ'}, {'d', U'द'}, {'D', U'ध'}, {'n', U'न'},
    {'p', U'प'}, {'P', U'फ'}, {'b', U'ब'}, {'B', U'भ'},
    {'m', U'म'}, {'y', U'य'}, {'r', U'र'}, {'l', U'ल'},
    {'L', U'ळ'}, {'v', U'व'}, {'S', U'श'}, {'z', U'ष'},
    {'s', U'स'}, {'h', U'ह'},
}};

constexpr char32_t kVirama = U'्';
constexpr char32_t kAnusvara = U'ं';
constexpr char32_t kVisarga = U'ः';
constexpr char32_t kCandrabindu = U'ँ';
constexpr char32_t kAvagraha = U'ऽ';
constexpr char32_t kDanda = U'।';
constexpr char32_t kDoubleDanda = U'॥';

constexpr std::string_view kInventory = "aAiIuUfFxXeEoOkKgGNcCjJYwWqQRtTdDnpPbBmyrlLvSzshMH~'";

bool passes_through(char32_t cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == U'+';
}

std::vector<char32_t> decode_utf8(std::string_view s) {
  std::vector<char32_t> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    int extra = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      cp = b0 & 0x1F;
      extra = 1;
    } else if ((b0 & 0xF0) == 0xE0) {
      cp = b0 & 0x0F;
      extra = 2;
    } else if ((b0 & 0xF8) == 0xF0) {
      cp = b0 & 0x07;
      extra = 3;
    } else {
      throw Error(ErrorCode::InvalidSequence, "malformed UTF-8 lead byte", out.size());
    }
    if (i + extra >= s.size()) {
      throw Error(ErrorCode::InvalidSequence, "truncated UTF-8 sequence", out.size());
    }
    for (int k = 1; k <= extra; ++k) {
      const auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) {
        throw Error(ErrorCode::InvalidSequence, "malformed UTF-8 continuation", out.size());
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    out.push_back(cp);
    i += extra + 1;
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

const VowelEntry* vowel_by_slp1(char c) {
  for (const auto& v : kVowels) {
    if (v.slp1 == c) return &v;
  }
  return nullptr;
}

const ConsonantEntry* consonant_by_slp1(char c) {
  for (const auto& k : kConsonants) {
    if (k.slp1 == c) return &k;
  }
  return nullptr;
}

std::optional<char> consonant_by_letter(char32_t cp) {
  for (const auto& k : kConsonants) {
    if (k.letter == cp) return k.slp1;
  }
  return std::nullopt;
}

std::optional<char> vowel_by_independent(char32_t cp) {
  for (const auto& v : kVowels) {
    if (v.independent == cp) return v.slp1;
  }
  return std::nullopt;
}

std::optional<char> vowel_by_sign(char32_t cp) {
  for (const auto& v : kVowels) {
    if (v.sign != 0 && v.sign == cp) return v.slp1;
  }
  return std::nullopt;
}

// Longest ITRANS token is three bytes ("chh", "RRi", "kSh", ...).
const std::unordered_map<std::string_view, std::string_view>& itrans_table() {
  static const std::unordered_map<std::string_view, std::string_view> table{
      {"a", "a"},     {"aa", "A"},    {"A", "A"},     {"i", "i"},    {"ii", "I"},
      {"I", "I"},     {"u", "u"},     {"uu", "U"},    {"U", "U"},    {"RRi", "f"},
      {"R^i", "f"},   {"RRI", "F"},   {"R^I", "F"},   {"LLi", "x"},  {"L^i", "x"},
      {"LLI", "X"},   {"L^I", "X"},   {"e", "e"},     {"ai", "E"},   {"o", "o"},
      {"au", "O"},    {"k", "k"},     {"kh", "K"},    {"g", "g"},    {"gh", "G"},
      {"~N", "N"},    {"N^", "N"},    {"ch", "c"},    {"Ch", "C"},   {"chh", "C"},
      {"j", "j"},     {"jh", "J"},    {"~n", "Y"},    {"JN", "Y"},   {"T", "w"},
      {"Th", "W"},    {"D", "q"},     {"Dh", "Q"},    {"N", "R"},    {"t", "t"},
      {"th", "T"},    {"d", "d"},     {"dh", "D"},    {"n", "n"},    {"p", "p"},
      {"ph", "P"},    {"b", "b"},     {"bh", "B"},    {"m", "m"},    {"y", "y"},
      {"r", "r"},     {"l", "l"},     {"L", "L"},     {"v", "v"},    {"w", "v"},
      {"sh", "S"},    {"Sh", "z"},    {"shh", "z"},   {"s", "s"},    {"h", "h"},
      {"x", "kz"},    {"kSh", "kz"},  {"GY", "jY"},   {"dny", "jY"}, {"M", "M"},
      {".n", "M"},    {".m", "M"},    {"H", "H"},     {".N", "~"},   {".a", "'"},
      {".", "."},     {"..", ".."},
  };
  return table;
}

}  // namespace

std::string_view to_string(PhonemeClass c) {
  switch (c) {
    case PhonemeClass::Vowel: return "Vowel";
    case PhonemeClass::Consonant: return "Consonant";
    case PhonemeClass::Visarga: return "Visarga";
    case PhonemeClass::Anusvara: return "Anusvara";
    case PhonemeClass::Other: return "Other";
  }
  return "Other";
}

std::string_view to_string(SandhiType t) {
  switch (t) {
    case SandhiType::Swara: return "Swara";
    case SandhiType::Vyanjana: return "Vyanjana";
    case SandhiType::Visarga: return "Visarga";
  }
  return "Vyanjana";
}

PhonemeClass classify_phoneme(char c) noexcept {
  if (vowel_by_slp1(c) != nullptr) return PhonemeClass::Vowel;
  if (consonant_by_slp1(c) != nullptr) return PhonemeClass::Consonant;
  if (c == 'H') return PhonemeClass::Visarga;
  if (c == 'M' || c == '~') return PhonemeClass::Anusvara;
  return PhonemeClass::Other;
}

bool is_slp1_char(char c) noexcept { return kInventory.find(c) != std::string_view::npos; }

bool is_vowel(char c) noexcept { return vowel_by_slp1(c) != nullptr; }

bool is_slp1_word(std::string_view word) noexcept {
  return !word.empty() && std::all_of(word.begin(), word.end(), is_slp1_char);
}

std::string_view slp1_inventory() noexcept { return kInventory; }

std::string devanagari_to_slp1(std::string_view utf8) {
  const auto cps = decode_utf8(utf8);
  std::string out;
  out.reserve(cps.size() * 2);
  std::size_t i = 0;
  while (i < cps.size()) {
    const char32_t cp = cps[i];
    if (passes_through(cp)) {
      out.push_back(static_cast<char>(cp));
      ++i;
    } else if (auto cons = consonant_by_letter(cp)) {
      out.push_back(*cons);
      ++i;
      if (i < cps.size() && cps[i] == kVirama) {
        ++i;
      } else if (i < cps.size()) {
        if (auto sign = vowel_by_sign(cps[i])) {
          out.push_back(*sign);
          ++i;
        } else {
          out.push_back('a');
        }
      } else {
        out.push_back('a');
      }
    } else if (auto vowel = vowel_by_independent(cp)) {
      out.push_back(*vowel);
      ++i;
    } else if (cp == kAnusvara) {
      out.push_back('M');
      ++i;
    } else if (cp == kVisarga) {
      out.push_back('H');
      ++i;
    } else if (cp == kCandrabindu) {
      out.push_back('~');
      ++i;
    } else if (cp == kAvagraha) {
      out.push_back('\'');
      ++i;
    } else if (cp == kDanda) {
      out.push_back('.');
      ++i;
    } else if (cp == kDoubleDanda) {
      out += "..";
      ++i;
    } else if (cp == kVirama || vowel_by_sign(cp)) {
      throw Error(ErrorCode::InvalidSequence, "dependent sign without a consonant", i);
    } else {
      throw Error(ErrorCode::UnknownCodePoint, "code point outside the Devanagari tables", i);
    }
  }
  return out;
}

std::string slp1_to_devanagari(std::string_view slp1) {
  std::string out;
  out.reserve(slp1.size() * 3);
  std::size_t i = 0;
  while (i < slp1.size()) {
    const char c = slp1[i];
    if (const auto* cons = consonant_by_slp1(c)) {
      append_utf8(out, cons->letter);
      ++i;
      const VowelEntry* v = i < slp1.size() ? vowel_by_slp1(slp1[i]) : nullptr;
      if (v == nullptr) {
        append_utf8(out, kVirama);
      } else {
        if (v->sign != 0) append_utf8(out, v->sign);
        ++i;
      }
    } else if (const auto* v = vowel_by_slp1(c)) {
      append_utf8(out, v->independent);
      ++i;
    } else if (c == 'M') {
      append_utf8(out, kAnusvara);
      ++i;
    } else if (c == 'H') {
      append_utf8(out, kVisarga);
      ++i;
    } else if (c == '~') {
      append_utf8(out, kCandrabindu);
      ++i;
    } else if (c == '\'') {
      append_utf8(out, kAvagraha);
      ++i;
    } else if (c == '.') {
      if (i + 1 < slp1.size() && slp1[i + 1] == '.') {
        append_utf8(out, kDoubleDanda);
        i += 2;
      } else {
        append_utf8(out, kDanda);
        ++i;
      }
    } else if (passes_through(static_cast<unsigned char>(c))) {
      out.push_back(c);
      ++i;
    } else {
      throw Error(ErrorCode::UnknownToken, "character outside the SLP1 inventory", i);
    }
  }
  return out;
}

std::string itrans_to_slp1(std::string_view itrans) {
  const auto& table = itrans_table();
  std::string out;
  out.reserve(itrans.size());
  std::size_t i = 0;
  while (i < itrans.size()) {
    if (passes_through(static_cast<unsigned char>(itrans[i]))) {
      out.push_back(itrans[i]);
      ++i;
      continue;
    }
    bool matched = false;
    for (std::size_t len = std::min<std::size_t>(3, itrans.size() - i); len > 0; --len) {
      auto it = table.find(itrans.substr(i, len));
      if (it != table.end()) {
        out += it->second;
        i += len;
        matched = true;
        break;
      }
    }
    if (!matched) {
      throw Error(ErrorCode::UnknownToken, "no ITRANS token matches", i);
    }
  }
  return out;
}

SandhiType classify_sandhi_type(std::string_view w1, std::string_view w2) {
  if (w1.empty() || w2.empty()) {
    throw Error(ErrorCode::EmptyWord, "sandhi classification needs two nonempty words");
  }
  if (w1.back() == 'H') return SandhiType::Visarga;
  if (is_vowel(w1.back()) && is_vowel(w2.front())) return SandhiType::Swara;
  return SandhiType::Vyanjana;
}

}  // namespace sandhi
