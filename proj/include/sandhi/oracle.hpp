#pragma once

// Rule-based sandhi for a small classical subset. Used to generate synthetic
// corpora and as ground truth in tests.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "sandhi/corpus.hpp"

namespace sandhi {

/// A junction rule. `left` sees the whole first word, `right` the whole second
/// word; `rewrite` replaces the last char of w1 and the first char of w2.
struct SandhiRule {
  std::string id;
  std::function<bool(std::string_view w1)> left;
  std::function<bool(std::string_view w2)> right;
  std::function<std::string(char tail, char head)> rewrite;
};

/// Rules in priority order; the first match wins.
const std::vector<SandhiRule>& sandhi_rules();

struct RuleApplication {
  std::string compound;
  std::string rule;
};

/// Throws Error{EmptyWord} or Error{NoRule}.
RuleApplication apply_rule(std::string_view w1, std::string_view w2);
std::string apply_rules(std::string_view w1, std::string_view w2);

struct Lexicon {
  std::vector<std::string> words;
  std::vector<double> weights;
};

/// Lines are "word" or "word<TAB>weight"; '#' starts a comment line. Throws
/// Error{EncodingError} for non-SLP1 words or bad weights and
/// Error{EmptyDataset} when no word is left.
Lexicon parse_lexicon(std::string_view text);
Lexicon load_lexicon(const std::filesystem::path& path);
const Lexicon& bundled_lexicon();

/// Samples distinct (w1, w2) pairs by weight and keeps those a rule covers.
/// Throws Error{InsufficientCoverage} if `count` triples are not reached
/// within the attempt budget.
std::vector<SandhiTriple> generate_synthetic(const Lexicon& lex, std::size_t count, std::uint64_t seed);

/// Window annotation recomputed char by char, without sharing code with
/// annotate_window. Same errors.
WindowAnnotation brute_force_window(const SandhiTriple& t);

}  // namespace sandhi
