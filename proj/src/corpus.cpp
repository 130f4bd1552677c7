#include "sandhi/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "sandhi/error.hpp"
#include "sandhi/translit.hpp"

namespace sandhi {
namespace {

constexpr long kMinDelta = -2;
constexpr long kMaxDelta = 1;
constexpr std::size_t kFlank = 2;
constexpr std::size_t kMinWindow = 2;
constexpr std::size_t kMaxWindow = 5;

bool is_reserved(char c) {
  return c == Vocabulary::kSeparator || c == Vocabulary::kStart || c == Vocabulary::kEnd;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    const auto tab = line.find('\t', pos);
    fields.push_back(trim(line.substr(pos, tab == std::string_view::npos ? line.npos : tab - pos)));
    if (tab == std::string_view::npos) break;
    pos = tab + 1;
  }
  return fields;
}

}  // namespace

std::string_view to_string(FilterReason r) {
  switch (r) {
    case FilterReason::Ok: return "Ok";
    case FilterReason::LengthRelation: return "LengthRelation";
    case FilterReason::WindowMismatch: return "WindowMismatch";
    case FilterReason::WindowLength: return "WindowLength";
    case FilterReason::IllegalChar: return "IllegalChar";
  }
  return "Ok";
}

std::string_view to_string(DiagnosticKind k) {
  switch (k) {
    case DiagnosticKind::BlankLine: return "BlankLine";
    case DiagnosticKind::FieldCount: return "FieldCount";
    case DiagnosticKind::EmptyField: return "EmptyField";
    case DiagnosticKind::ReservedChar: return "ReservedChar";
    case DiagnosticKind::IllegalChar: return "IllegalChar";
    case DiagnosticKind::Encoding: return "Encoding";
  }
  return "BlankLine";
}

std::string_view to_string(StageKind k) {
  switch (k) {
    case StageKind::Joiner: return "joiner";
    case StageKind::Tagger: return "tagger";
    case StageKind::WindowSplitter: return "wsplitter";
  }
  return "joiner";
}

ParsedCorpus parse_corpus_text(std::string_view text, Script script) {
  ParsedCorpus out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view raw =
        text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    // A trailing newline does not start another line.
    if (nl == std::string_view::npos && raw.empty()) break;

    auto diag = [&](DiagnosticKind kind, std::string msg) {
      out.diagnostics.push_back({line_no, kind, std::move(msg)});
    };

    if (trim(raw).find_first_not_of('\t') == std::string_view::npos) {
      diag(DiagnosticKind::BlankLine, "blank line");
      continue;
    }
    const auto fields = split_fields(raw);
    if (fields.size() != 3) {
      diag(DiagnosticKind::FieldCount, "expected 3 tab-separated fields, got " +
                                           std::to_string(fields.size()));
      continue;
    }
    std::array<std::string, 3> words;
    bool ok = true;
    for (std::size_t i = 0; i < 3 && ok; ++i) {
      if (fields[i].empty()) {
        diag(DiagnosticKind::EmptyField, "field " + std::to_string(i + 1) + " is empty");
        ok = false;
        break;
      }
      if (script == Script::Devanagari) {
        try {
          words[i] = devanagari_to_slp1(fields[i]);
        } catch (const Error& e) {
          diag(DiagnosticKind::Encoding, e.what());
          ok = false;
          break;
        }
      } else {
        words[i] = std::string(fields[i]);
      }
      const auto& w = words[i];
      if (std::any_of(w.begin(), w.end(), is_reserved)) {
        diag(DiagnosticKind::ReservedChar, "reserved token in '" + w + "'");
        ok = false;
      } else if (!is_slp1_word(w)) {
        diag(DiagnosticKind::IllegalChar, "non-SLP1 character in '" + w + "'");
        ok = false;
      }
    }
    if (ok) {
      out.triples.push_back({std::move(words[0]), std::move(words[1]), std::move(words[2])});
    }
  }
  return out;
}

ParsedCorpus parse_corpus(const std::filesystem::path& path, Script script) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open corpus " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_corpus_text(buf.str(), script);
}

long length_delta(const SandhiTriple& t) {
  return static_cast<long>(t.cw.size()) - static_cast<long>(t.w1.size() + t.w2.size());
}

FilterVerdict filter_triple(const SandhiTriple& t) {
  if (!is_slp1_word(t.w1) || !is_slp1_word(t.w2) || !is_slp1_word(t.cw)) {
    return {false, FilterReason::IllegalChar};
  }
  const long delta = length_delta(t);
  if (delta < kMinDelta || delta > kMaxDelta) {
    return {false, FilterReason::LengthRelation};
  }
  try {
    annotate_window(t);
  } catch (const Error& e) {
    return {false, e.code() == ErrorCode::WindowMismatch ? FilterReason::WindowMismatch
                                                          : FilterReason::WindowLength};
  }
  return {true, FilterReason::Ok};
}

WindowAnnotation annotate_window(const SandhiTriple& t) {
  const std::string_view w1 = t.w1;
  const std::string_view w2 = t.w2;
  const std::string_view cw = t.cw;
  WindowAnnotation a;
  a.n1 = w1.size() > kFlank ? w1.size() - kFlank : 0;
  a.n2 = w2.size() > kFlank ? w2.size() - kFlank : 0;
  if (a.n1 + a.n2 > cw.size()) {
    throw Error(ErrorCode::WindowLength, "flanks longer than the compound");
  }
  if (cw.substr(0, a.n1) != w1.substr(0, a.n1) ||
      cw.substr(cw.size() - a.n2) != w2.substr(w2.size() - a.n2)) {
    throw Error(ErrorCode::WindowMismatch, "compound flanks differ from the input words");
  }
  const std::size_t len = cw.size() - a.n1 - a.n2;
  if (len < kMinWindow || len > kMaxWindow) {
    throw Error(ErrorCode::WindowLength, "window of " + std::to_string(len) + " chars");
  }
  a.window = std::string(cw.substr(a.n1, len));
  a.tw1 = std::string(w1.substr(a.n1));
  a.tw2 = std::string(w2.substr(0, w2.size() - a.n2));
  return a;
}

WindowAnnotation widen_window(const SandhiTriple& t, const WindowAnnotation& a, std::size_t width) {
  const std::size_t target = std::min(width, t.cw.size());
  if (a.window.size() >= target) return a;
  std::size_t n1 = a.n1;
  std::size_t n2 = a.n2;
  std::size_t need = target - a.window.size();
  bool left_turn = true;
  while (need > 0) {
    if (left_turn && n1 > 0) {
      --n1;
    } else if (!left_turn && n2 > 0) {
      --n2;
    } else if (n1 > 0) {
      --n1;
    } else {
      --n2;
    }
    --need;
    left_turn = !left_turn;
  }
  WindowAnnotation w;
  w.n1 = n1;
  w.n2 = n2;
  w.window = t.cw.substr(n1, t.cw.size() - n1 - n2);
  w.tw1 = t.w1.substr(n1);
  w.tw2 = t.w2.substr(0, t.w2.size() - n2);
  return w;
}

SplitSizes split_sizes(std::size_t n) {
  SplitSizes s;
  s.test = static_cast<std::size_t>(std::llround(0.2 * static_cast<double>(n)));
  s.validation = static_cast<std::size_t>(std::llround(0.2 * static_cast<double>(n - s.test)));
  s.train = n - s.test - s.validation;
  return s;
}

void throw_empty_dataset() { throw Error(ErrorCode::EmptyDataset, "no examples to split"); }

Vocabulary Vocabulary::build(std::span<const std::string> sequences) {
  std::set<char> chars;
  for (const auto& s : sequences) {
    for (char c : s) {
      if (!is_reserved(c)) chars.insert(c);
    }
  }
  Vocabulary v;
  v.tokens_.assign(chars.begin(), chars.end());
  v.tokens_.push_back(kSeparator);
  v.tokens_.push_back(kStart);
  v.tokens_.push_back(kEnd);
  v.tokens_.push_back('\0');
  v.reindex();
  return v;
}

Vocabulary Vocabulary::from_tokens(std::span<const std::string> tokens) {
  Vocabulary v;
  if (tokens.empty() || tokens.back() != kPadName) {
    throw Error(ErrorCode::InvalidConfig, "vocabulary must end with the PAD token");
  }
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    if (tokens[i].size() != 1 || tokens[i][0] == '\0') {
      throw Error(ErrorCode::InvalidConfig, "vocabulary token '" + tokens[i] + "' is not one char");
    }
    v.tokens_.push_back(tokens[i][0]);
  }
  v.tokens_.push_back('\0');
  std::set<char> seen(v.tokens_.begin(), v.tokens_.end());
  if (seen.size() != v.tokens_.size()) {
    throw Error(ErrorCode::InvalidConfig, "duplicate vocabulary token");
  }
  for (char special : {kSeparator, kStart, kEnd}) {
    if (!seen.contains(special)) {
      throw Error(ErrorCode::InvalidConfig, std::string("vocabulary lacks '") + special + "'");
    }
  }
  v.reindex();
  return v;
}

void Vocabulary::reindex() {
  index_.fill(-1);
  // PAD is never looked up by char.
  for (std::size_t i = 0; i + 1 < tokens_.size(); ++i) {
    index_[static_cast<unsigned char>(tokens_[i])] = static_cast<int>(i);
  }
}

std::vector<std::string> Vocabulary::token_strings() const {
  std::vector<std::string> out;
  out.reserve(tokens_.size());
  for (std::size_t i = 0; i + 1 < tokens_.size(); ++i) out.emplace_back(1, tokens_[i]);
  out.emplace_back(kPadName);
  return out;
}

std::vector<int> Vocabulary::encode(std::string_view text) const {
  std::vector<int> ids;
  ids.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const int id = index(text[i]);
    if (id < 0) {
      throw Error(ErrorCode::VocabMiss, std::string("char '") + text[i] + "' not in vocabulary", i);
    }
    ids.push_back(id);
  }
  return ids;
}

std::vector<float> Vocabulary::one_hot(int i) const {
  std::vector<float> v(tokens_.size(), 0.0f);
  v.at(static_cast<std::size_t>(i)) = 1.0f;
  return v;
}

std::vector<TrainingExample> make_stage_examples(std::span<const AnnotatedTriple> annotated,
                                                 StageKind kind, Truncation trunc) {
  std::vector<TrainingExample> out;
  out.reserve(annotated.size());
  for (const auto& [t, a] : annotated) {
    TrainingExample ex;
    switch (kind) {
      case StageKind::Joiner: {
        const TruncationPlan plan = truncate_pair(t.w1, t.w2, trunc);
        auto core = compound_core(t.cw, plan);
        if (!core) continue;
        ex.input = plan.model_input();
        ex.target = Vocabulary::kStart + *core + Vocabulary::kEnd;
        break;
      }
      case StageKind::Tagger:
        ex.input = t.cw;
        ex.labels.assign(t.cw.size(), 0.0f);
        std::fill_n(ex.labels.begin() + static_cast<std::ptrdiff_t>(a.start()), a.length(), 1.0f);
        break;
      case StageKind::WindowSplitter:
        ex.input = a.window;
        ex.target = Vocabulary::kStart + a.tw1 + Vocabulary::kSeparator + a.tw2 + Vocabulary::kEnd;
        break;
    }
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<AnnotatedTriple> annotate_all(std::span<const SandhiTriple> triples, std::size_t widen_to) {
  std::vector<AnnotatedTriple> out;
  out.reserve(triples.size());
  for (const auto& t : triples) {
    WindowAnnotation a = annotate_window(t);
    if (widen_to > 0) a = widen_window(t, a, widen_to);
    out.push_back({t, std::move(a)});
  }
  return out;
}

std::string format_triple(const SandhiTriple& t) { return t.w1 + '\t' + t.w2 + '\t' + t.cw; }

void write_triples(const std::filesystem::path& path, std::span<const SandhiTriple> triples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::IoError, "cannot write " + path.string());
  }
  for (const auto& t : triples) out << format_triple(t) << '\n';
  if (!out) {
    throw Error(ErrorCode::IoError, "write failed for " + path.string());
  }
}

}  // namespace sandhi
