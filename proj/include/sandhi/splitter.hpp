#pragma once

// Two-stage sandhi split.
//
// Stage 1 tags every char of the compound with a score in (0, 1) and picks
// the contiguous span of min(5, |compound|) chars with the largest score sum.
// Stage 2 decodes that span into "ps1+ps2". The chars before the span are
// prepended to ps1 and the chars after it appended to ps2.

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>

#include "sandhi/corpus.hpp"
#include "sandhi/nn.hpp"

namespace sandhi {

inline constexpr std::size_t kWindowWidth = 5;

struct WindowSpan {
  std::size_t start = 0;
  std::size_t length = 0;
  double score = 0.0;

  friend bool operator==(const WindowSpan& a, const WindowSpan& b) {
    return a.start == b.start && a.length == b.length;
  }
};

struct SplitResult {
  std::string pw1;
  std::string pw2;
  WindowSpan window;
  std::string ps1;
  std::string ps2;
  std::string nw1;
  std::string nw2;
};

inline nn::TrainConfig default_tagger_train_config() {
  nn::TrainConfig cfg;
  cfg.hidden_size = 64;
  cfg.batch_size = 64;
  cfg.epochs = 40;
  return cfg;
}

inline nn::TrainConfig default_wsplitter_train_config() {
  nn::TrainConfig cfg;
  cfg.hidden_size = 128;
  cfg.batch_size = 64;
  cfg.epochs = 30;
  return cfg;
}

struct TaggerConfig {
  nn::TrainConfig train = default_tagger_train_config();
  std::size_t window_width = kWindowWidth;
};

struct SplitterConfig {
  nn::TrainConfig train = default_wsplitter_train_config();
  std::size_t window_width = kWindowWidth;
};

/// Leftmost span of min(width, |scores|) entries with the largest sum.
WindowSpan best_window(std::span<const float> scores, std::size_t width = kWindowWidth);

/// Throws Error{WordTooShort} for compounds under 2 chars.
WindowSpan predict_window(const nn::TaggerModel& tagger, std::string_view compound,
                          std::size_t width = kWindowWidth);

/// Decodes the window and splits at the first '+'. Throws Error{WindowLength}
/// outside 2..width chars, Error{NoSeparator}, or Error{MalformedDecode} when
/// a second '+' appears.
std::pair<std::string, std::string> split_window(const nn::Seq2SeqModel& model, std::string_view window,
                                                 std::size_t width = kWindowWidth);

SplitResult split(const nn::TaggerModel& tagger, const nn::Seq2SeqModel& wsplitter, std::string_view compound,
                  std::size_t width = kWindowWidth);

/// Gold span for a retained triple: the annotated window widened to `width`.
WindowSpan gold_window(const SandhiTriple& t, std::size_t width = kWindowWidth);

struct TaggerTraining {
  nn::TaggerModel model;
  nn::History history;
};

struct WindowSplitterTraining {
  nn::Seq2SeqModel model;
  nn::History history;
};

/// Triples must pass filter_triple. Throws Error{EmptyDataset}.
TaggerTraining train_stage1(std::span<const SandhiTriple> train, std::span<const SandhiTriple> validation,
                            const TaggerConfig& cfg, const nn::EpochCallback& on_epoch = {});
WindowSplitterTraining train_stage2(std::span<const SandhiTriple> train,
                                    std::span<const SandhiTriple> validation, const SplitterConfig& cfg,
                                    const nn::EpochCallback& on_epoch = {});

void save_tagger(const nn::TaggerModel& model, const std::filesystem::path& path,
                 std::size_t width = kWindowWidth);
void save_wsplitter(const nn::Seq2SeqModel& model, const std::filesystem::path& path,
                    std::size_t width = kWindowWidth);

}  // namespace sandhi
