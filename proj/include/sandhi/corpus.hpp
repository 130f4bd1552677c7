#pragma once

// Corpus parsing, cleaning, sandhi-window annotation, dataset splitting and
// per-model example construction.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iterator>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sandhi/random.hpp"
#include "sandhi/truncation.hpp"

namespace sandhi {

/// (first word, second word, compound). Text is SLP1.
struct SandhiTriple {
  std::string w1;
  std::string w2;
  std::string cw;

  friend bool operator==(const SandhiTriple&, const SandhiTriple&) = default;
  friend auto operator<=>(const SandhiTriple&, const SandhiTriple&) = default;
};

enum class FilterReason { Ok, LengthRelation, WindowMismatch, WindowLength, IllegalChar };
std::string_view to_string(FilterReason r);

struct FilterVerdict {
  bool retained = false;
  FilterReason reason = FilterReason::Ok;
};

/// Sandhi-window of a compound. The compound is
/// cw[0, n1) ++ window ++ cw[n1 + |window|, |cw|), where the leading flank is
/// copied from w1 and the trailing flank from w2; tw1/tw2 are what the window
/// splits into.
struct WindowAnnotation {
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::string window;
  std::string tw1;
  std::string tw2;

  std::size_t start() const { return n1; }
  std::size_t length() const { return window.size(); }

  friend bool operator==(const WindowAnnotation&, const WindowAnnotation&) = default;
};

struct AnnotatedTriple {
  SandhiTriple triple;
  WindowAnnotation window;
};

enum class DiagnosticKind { BlankLine, FieldCount, EmptyField, ReservedChar, IllegalChar, Encoding };
std::string_view to_string(DiagnosticKind k);

struct Diagnostic {
  std::size_t line = 0;  // 1-based
  DiagnosticKind kind = DiagnosticKind::BlankLine;
  std::string message;
};

enum class Script { Slp1, Devanagari };

struct ParsedCorpus {
  std::vector<SandhiTriple> triples;
  std::vector<Diagnostic> diagnostics;
};

/// Parses "w1<TAB>w2<TAB>cw" lines. Malformed lines become diagnostics.
ParsedCorpus parse_corpus_text(std::string_view text, Script script = Script::Slp1);

/// Throws Error{IoError} if the file cannot be read.
ParsedCorpus parse_corpus(const std::filesystem::path& path, Script script = Script::Slp1);

/// Length difference N_c - (N_w1 + N_w2).
long length_delta(const SandhiTriple& t);

/// Retained iff -2 <= length_delta <= 1 and annotate_window succeeds.
FilterVerdict filter_triple(const SandhiTriple& t);

/// Fixed marking rule: n1 = max(0, |w1|-2), n2 = max(0, |w2|-2).
/// Throws Error{WindowMismatch} when the flanks differ from the words and
/// Error{WindowLength} when the window is not 2..5 chars.
WindowAnnotation annotate_window(const SandhiTriple& t);

/// Grows an annotated window to min(width, |cw|) chars by moving flank chars
/// into it, alternating left then right and spilling to the other side when
/// one flank runs out. tw1/tw2 grow accordingly. This is the span the tagger
/// is trained to mark and the window splitter is trained to split.
WindowAnnotation widen_window(const SandhiTriple& t, const WindowAnnotation& a,
                              std::size_t width = 5);

struct SplitSizes {
  std::size_t train = 0;
  std::size_t validation = 0;
  std::size_t test = 0;
};

/// test = round(0.2 n); validation = round(0.2 (n - test)); the rest trains.
SplitSizes split_sizes(std::size_t n);

template <typename T>
struct DatasetSplit {
  std::vector<T> train;
  std::vector<T> validation;
  std::vector<T> test;
  std::uint64_t seed = 0;
};

[[noreturn]] void throw_empty_dataset();

/// Seeded shuffle then partition into test, validation, train (in that order
/// of the shuffled list). Throws Error{EmptyDataset}.
template <typename T>
DatasetSplit<T> split_dataset(std::vector<T> examples, std::uint64_t seed);

/// Token inventory shared by a model's inputs and outputs.
class Vocabulary {
 public:
  static constexpr char kSeparator = '+';
  static constexpr char kStart = '&';
  static constexpr char kEnd = '$';
  static constexpr std::string_view kPadName = "<pad>";

  Vocabulary() = default;

  /// Sorted distinct chars of `sequences` (specials excluded), then
  /// '+', '&', '$', PAD.
  static Vocabulary build(std::span<const std::string> sequences);

  /// Inverse of token_strings(). Throws Error{InvalidConfig} on duplicates,
  /// missing specials or multi-char tokens.
  static Vocabulary from_tokens(std::span<const std::string> tokens);

  std::size_t size() const { return tokens_.size(); }
  int index(char c) const { return index_[static_cast<unsigned char>(c)]; }
  bool contains(char c) const { return index(c) >= 0; }
  int pad_index() const { return static_cast<int>(tokens_.size()) - 1; }
  int start_index() const { return index(kStart); }
  int end_index() const { return index(kEnd); }
  int separator_index() const { return index(kSeparator); }

  /// Char for a non-PAD token index.
  char token(int i) const { return tokens_.at(static_cast<std::size_t>(i)); }

  std::vector<std::string> token_strings() const;

  /// Throws Error{VocabMiss} naming the first char not in the vocabulary.
  std::vector<int> encode(std::string_view text) const;

  std::vector<float> one_hot(int i) const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.tokens_ == b.tokens_; }

 private:
  void reindex();

  std::vector<char> tokens_;  // PAD stored as '\0' in the last slot
  std::array<int, 256> index_{};
};

inline Vocabulary build_vocabulary(std::span<const std::string> sequences) {
  return Vocabulary::build(sequences);
}

enum class StageKind { Joiner, Tagger, WindowSplitter };
std::string_view to_string(StageKind k);

/// Sequence examples fill `target`; tagger examples fill `labels` (one 0/1
/// per input char) and leave `target` empty.
struct TrainingExample {
  std::string input;
  std::string target;
  std::vector<float> labels;
};

/// Joiner: input "t1+t2", target "&" + core + "$" (triples whose compound does
/// not carry the truncation flanks are skipped).
/// Tagger: input cw, labels 1 exactly on the annotated window.
/// WindowSplitter: input window, target "&" + tw1 + "+" + tw2 + "$".
std::vector<TrainingExample> make_stage_examples(std::span<const AnnotatedTriple> annotated,
                                                 StageKind kind, Truncation trunc = {});

/// Annotates every triple (which must already pass filter_triple) and, when
/// `widen_to` is nonzero, widens each window.
std::vector<AnnotatedTriple> annotate_all(std::span<const SandhiTriple> triples,
                                          std::size_t widen_to = 0);

std::string format_triple(const SandhiTriple& t);
void write_triples(const std::filesystem::path& path, std::span<const SandhiTriple> triples);

template <typename T>
DatasetSplit<T> split_dataset(std::vector<T> examples, std::uint64_t seed) {
  if (examples.empty()) {
    throw_empty_dataset();
  }
  const SplitSizes sizes = split_sizes(examples.size());
  Rng rng(seed);
  rng.shuffle(examples);
  DatasetSplit<T> out;
  out.seed = seed;
  auto first = std::make_move_iterator(examples.begin());
  out.test.assign(first, first + static_cast<std::ptrdiff_t>(sizes.test));
  first += static_cast<std::ptrdiff_t>(sizes.test);
  out.validation.assign(first, first + static_cast<std::ptrdiff_t>(sizes.validation));
  first += static_cast<std::ptrdiff_t>(sizes.validation);
  out.train.assign(first, std::make_move_iterator(examples.end()));
  return out;
}

}  // namespace sandhi
