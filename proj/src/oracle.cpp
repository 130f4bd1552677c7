#include "sandhi/oracle.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "sandhi/error.hpp"
#include "sandhi/random.hpp"
#include "sandhi/translit.hpp"

namespace sandhi {
namespace detail {
extern const std::string_view kBundledLexicon;
}

namespace {

bool in(std::string_view set, char c) { return set.find(c) != std::string_view::npos; }

char last(std::string_view w) { return w.back(); }
char first(std::string_view w) { return w.front(); }

// Voiced sounds that turn a final visarga into r ('r' itself is excluded:
// H + r is a different rule).
constexpr std::string_view kVisargaVoiced = "gGjJqQdDbBnmyvlhNYRaAiIuUfFxXeEoO";
// Voiced consonants that voice a preceding final stop.
constexpr std::string_view kStopVoiced = "gGdDbByrv";
// Stems whose visarga comes from r and so becomes r even after a/A.
constexpr std::array<std::string_view, 4> kRStems{"punaH", "antaH", "prAtaH", "svaH"};

char voiced_of(char stop) {
  switch (stop) {
    case 'k': return 'g';
    case 'w': return 'q';
    case 't': return 'd';
    default: return 'b';
  }
}

char aspirate_of(char voiced) {
  switch (voiced) {
    case 'g': return 'G';
    case 'q': return 'Q';
    case 'd': return 'D';
    default: return 'B';
  }
}

std::vector<SandhiRule> make_rules() {
  std::vector<SandhiRule> rules;
  auto ends_in = [](std::string_view set) {
    return [set](std::string_view w) { return in(set, last(w)); };
  };
  auto starts_with = [](std::string_view set) {
    return [set](std::string_view w) { return in(set, first(w)); };
  };
  auto fixed = [](std::string out) { return [out](char, char) { return out; }; };

  rules.push_back({"savarna-dirgha-a", ends_in("aA"), starts_with("aA"), fixed("A")});
  rules.push_back({"savarna-dirgha-i", ends_in("iI"), starts_with("iI"), fixed("I")});
  rules.push_back({"savarna-dirgha-u", ends_in("uU"), starts_with("uU"), fixed("U")});
  rules.push_back({"guna-e", ends_in("aA"), starts_with("iI"), fixed("e")});
  rules.push_back({"guna-o", ends_in("aA"), starts_with("uU"), fixed("o")});
  rules.push_back({"vriddhi-E", ends_in("aA"), starts_with("eE"), fixed("E")});
  rules.push_back({"vriddhi-O", ends_in("aA"), starts_with("oO"), fixed("O")});
  // Like vowels were taken by savarna-dirgha above.
  rules.push_back({"yan-y", ends_in("iI"), [](std::string_view w) { return is_vowel(first(w)); },
                   [](char, char head) { return std::string{'y', head}; }});
  rules.push_back({"yan-v", ends_in("uU"), [](std::string_view w) { return is_vowel(first(w)); },
                   [](char, char head) { return std::string{'v', head}; }});
  rules.push_back({"visarga-r",
                   [](std::string_view w) {
                     if (w.size() < 2 || last(w) != 'H') return false;
                     if (std::find(kRStems.begin(), kRStems.end(), w) != kRStems.end()) return true;
                     return !in("aA", w[w.size() - 2]);
                   },
                   starts_with(kVisargaVoiced), [](char, char head) { return std::string{'r', head}; }});
  rules.push_back({"stop-voicing", ends_in("kwtp"),
                   [](std::string_view w) {
                     const char c = first(w);
                     return is_vowel(c) || in(kStopVoiced, c) || c == 'h';
                   },
                   [](char tail, char head) {
                     const char v = voiced_of(tail);
                     // stop + h: the h takes the voice and aspiration of the stop
                     return head == 'h' ? std::string{v, aspirate_of(v)} : std::string{v, head};
                   }});
  return rules;
}

[[noreturn]] void bad_lexicon(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::EncodingError, "lexicon line " + std::to_string(line) + ": " + what);
}

}  // namespace

const std::vector<SandhiRule>& sandhi_rules() {
  static const std::vector<SandhiRule> rules = make_rules();
  return rules;
}

RuleApplication apply_rule(std::string_view w1, std::string_view w2) {
  if (w1.empty() || w2.empty()) throw Error(ErrorCode::EmptyWord, "apply_rules needs two nonempty words");
  for (const auto& rule : sandhi_rules()) {
    if (rule.left(w1) && rule.right(w2)) {
      std::string out(w1.substr(0, w1.size() - 1));
      out += rule.rewrite(last(w1), first(w2));
      out += w2.substr(1);
      return {std::move(out), rule.id};
    }
  }
  throw Error(ErrorCode::NoRule, "no rule joins '" + std::string(w1) + "' and '" + std::string(w2) + "'");
}

std::string apply_rules(std::string_view w1, std::string_view w2) { return apply_rule(w1, w2).compound; }

Lexicon parse_lexicon(std::string_view text) {
  Lexicon lex;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    const std::string word = line.substr(0, tab);
    if (!is_slp1_word(word)) bad_lexicon(lineno, "'" + word + "' is not an SLP1 word");
    double weight = 1.0;
    if (tab != std::string::npos) {
      const std::string w = line.substr(tab + 1);
      const auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), weight);
      if (ec != std::errc() || ptr != w.data() + w.size() || !(weight > 0.0) || !std::isfinite(weight)) {
        bad_lexicon(lineno, "bad weight '" + w + "'");
      }
    }
    lex.words.push_back(word);
    lex.weights.push_back(weight);
  }
  if (lex.words.empty()) throw Error(ErrorCode::EmptyDataset, "lexicon has no words");
  return lex;
}

Lexicon load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read lexicon " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_lexicon(buf.str());
}

const Lexicon& bundled_lexicon() {
  static const Lexicon lex = parse_lexicon(detail::kBundledLexicon);
  return lex;
}

std::vector<SandhiTriple> generate_synthetic(const Lexicon& lex, std::size_t count, std::uint64_t seed) {
  if (lex.words.empty() || lex.words.size() != lex.weights.size()) {
    throw Error(ErrorCode::EmptyDataset, "lexicon has no words");
  }
  std::vector<double> cumulative(lex.weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < lex.weights.size(); ++i) cumulative[i] = total += lex.weights[i];
  Rng rng(seed);
  auto draw = [&] {
    const double x = rng.uniform() * total;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), x);
    return static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cumulative.begin(),
                                                             static_cast<std::ptrdiff_t>(cumulative.size()) - 1));
  };

  std::vector<SandhiTriple> out;
  out.reserve(count);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  const std::size_t budget = std::max<std::size_t>(10000, 200 * count);
  for (std::size_t attempt = 0; attempt < budget && out.size() < count; ++attempt) {
    const std::size_t i = draw();
    const std::size_t j = draw();
    if (!seen.insert({i, j}).second) continue;
    SandhiTriple t{lex.words[i], lex.words[j], {}};
    try {
      t.cw = apply_rules(t.w1, t.w2);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoRule) throw;
      continue;
    }
    if (!filter_triple(t).retained) continue;
    out.push_back(std::move(t));
  }
  if (out.size() < count) {
    throw Error(ErrorCode::InsufficientCoverage, "lexicon yields only " + std::to_string(out.size()) + " of " +
                                                     std::to_string(count) + " requested triples");
  }
  return out;
}

WindowAnnotation brute_force_window(const SandhiTriple& t) {
  const std::size_t l1 = t.w1.size();
  const std::size_t l2 = t.w2.size();
  const std::size_t lc = t.cw.size();
  WindowAnnotation a;
  a.n1 = l1 >= 2 ? l1 - 2 : 0;
  a.n2 = l2 >= 2 ? l2 - 2 : 0;
  if (a.n1 + a.n2 > lc) throw Error(ErrorCode::WindowLength, "flanks overlap");
  for (std::size_t k = 0; k < a.n1; ++k) {
    if (t.cw[k] != t.w1[k]) throw Error(ErrorCode::WindowMismatch, "left flank differs at " + std::to_string(k));
  }
  for (std::size_t k = 1; k <= a.n2; ++k) {
    if (t.cw[lc - k] != t.w2[l2 - k]) {
      throw Error(ErrorCode::WindowMismatch, "right flank differs " + std::to_string(k) + " from the end");
    }
  }
  for (std::size_t k = a.n1; k + a.n2 < lc; ++k) a.window.push_back(t.cw[k]);
  if (a.window.size() < 2 || a.window.size() > 5) {
    throw Error(ErrorCode::WindowLength, "window of " + std::to_string(a.window.size()) + " chars");
  }
  for (std::size_t k = a.n1; k < l1; ++k) a.tw1.push_back(t.w1[k]);
  for (std::size_t k = 0; k + a.n2 < l2; ++k) a.tw2.push_back(t.w2[k]);
  return a;
}

}  // namespace sandhi
