#include "sandhi/splitter.hpp"

#include <algorithm>

#include "sandhi/checkpoint.hpp"
#include "sandhi/error.hpp"

namespace sandhi {
namespace {

std::vector<std::string> vocab_sequences(std::span<const TrainingExample> a, std::span<const TrainingExample> b) {
  std::vector<std::string> seqs;
  for (auto set : {a, b}) {
    for (const auto& ex : set) {
      seqs.push_back(ex.input);
      seqs.push_back(ex.target);
    }
  }
  return seqs;
}

}  // namespace

WindowSpan best_window(std::span<const float> scores, std::size_t width) {
  WindowSpan best;
  best.length = std::min(width, scores.size());
  if (best.length == 0) return best;
  double sum = 0.0;
  for (std::size_t k = 0; k < best.length; ++k) sum += scores[k];
  best.score = sum;
  for (std::size_t start = 1; start + best.length <= scores.size(); ++start) {
    // Recompute rather than slide so equal sums compare exactly.
    double s = 0.0;
    for (std::size_t k = start; k < start + best.length; ++k) s += scores[k];
    if (s > best.score) {
      best.score = s;
      best.start = start;
    }
  }
  return best;
}

WindowSpan predict_window(const nn::TaggerModel& tagger, std::string_view compound, std::size_t width) {
  if (compound.size() < 2) {
    throw Error(ErrorCode::WordTooShort, "compound '" + std::string(compound) + "' is shorter than 2 chars");
  }
  const auto scores = nn::tag_scores(tagger, compound);
  return best_window(scores, width);
}

std::pair<std::string, std::string> split_window(const nn::Seq2SeqModel& model, std::string_view window,
                                                 std::size_t width) {
  if (window.size() < 2 || window.size() > width) {
    throw Error(ErrorCode::WindowLength, "window '" + std::string(window) + "' outside 2.." + std::to_string(width));
  }
  const std::string core = nn::greedy_decode(model, window);
  const auto plus = core.find(Vocabulary::kSeparator);
  if (plus == std::string::npos) {
    throw Error(ErrorCode::NoSeparator, "decoded window '" + core + "' has no '+'");
  }
  if (core.find(Vocabulary::kSeparator, plus + 1) != std::string::npos) {
    throw Error(ErrorCode::MalformedDecode, "decoded window '" + core + "' has several '+'");
  }
  return {core.substr(0, plus), core.substr(plus + 1)};
}

SplitResult split(const nn::TaggerModel& tagger, const nn::Seq2SeqModel& wsplitter, std::string_view compound,
                  std::size_t width) {
  SplitResult r;
  r.window = predict_window(tagger, compound, width);
  const std::string_view span = compound.substr(r.window.start, r.window.length);
  std::tie(r.ps1, r.ps2) = split_window(wsplitter, span, width);
  r.nw1 = std::string(compound.substr(0, r.window.start));
  r.nw2 = std::string(compound.substr(r.window.start + r.window.length));
  r.pw1 = r.nw1 + r.ps1;
  r.pw2 = r.ps2 + r.nw2;
  return r;
}

WindowSpan gold_window(const SandhiTriple& t, std::size_t width) {
  const WindowAnnotation a = widen_window(t, annotate_window(t), width);
  return {a.start(), a.length(), 0.0};
}

TaggerTraining train_stage1(std::span<const SandhiTriple> train, std::span<const SandhiTriple> validation,
                            const TaggerConfig& cfg, const nn::EpochCallback& on_epoch) {
  if (train.empty()) throw Error(ErrorCode::EmptyDataset, "no tagger training examples");
  const auto tr = make_stage_examples(annotate_all(train, cfg.window_width), StageKind::Tagger);
  const auto va = make_stage_examples(annotate_all(validation, cfg.window_width), StageKind::Tagger);
  TaggerTraining out;
  out.model = nn::make_tagger(Vocabulary::build(vocab_sequences(tr, va)), cfg.train);
  out.history = nn::train_tagger(out.model, tr, va, cfg.train, on_epoch);
  return out;
}

WindowSplitterTraining train_stage2(std::span<const SandhiTriple> train,
                                    std::span<const SandhiTriple> validation, const SplitterConfig& cfg,
                                    const nn::EpochCallback& on_epoch) {
  if (train.empty()) throw Error(ErrorCode::EmptyDataset, "no window-splitter training examples");
  const auto tr = make_stage_examples(annotate_all(train, cfg.window_width), StageKind::WindowSplitter);
  const auto va = make_stage_examples(annotate_all(validation, cfg.window_width), StageKind::WindowSplitter);
  WindowSplitterTraining out;
  out.model = nn::make_seq2seq(Vocabulary::build(vocab_sequences(tr, va)), cfg.train);
  out.history = nn::train_seq2seq(out.model, tr, va, cfg.train, on_epoch);
  return out;
}

void save_tagger(const nn::TaggerModel& model, const std::filesystem::path& path, std::size_t width) {
  Checkpoint c;
  c.kind = "tagger";
  c.extra = {{"window_width", width}};
  c.model = model;
  save_checkpoint(c, path);
}

void save_wsplitter(const nn::Seq2SeqModel& model, const std::filesystem::path& path, std::size_t width) {
  Checkpoint c;
  c.kind = "wsplitter";
  c.extra = {{"window_width", width}};
  c.model = model;
  save_checkpoint(c, path);
}

}  // namespace sandhi
