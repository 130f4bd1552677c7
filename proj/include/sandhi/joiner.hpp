#pragma once

// Sandhi generation. The pair is truncated to the last `n` chars of w1 and the
// first `m` chars of w2, the seq2seq model rewrites "t1+t2" into the compound
// core, and the untouched prefix and suffix are reattached.

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "sandhi/corpus.hpp"
#include "sandhi/nn.hpp"
#include "sandhi/truncation.hpp"

namespace sandhi {

inline nn::TrainConfig default_joiner_train_config() {
  nn::TrainConfig cfg;
  cfg.hidden_size = 16;
  cfg.batch_size = 64;
  cfg.epochs = 100;
  return cfg;
}

struct JoinerConfig {
  Truncation trunc{5, 2};
  nn::TrainConfig train = default_joiner_train_config();

  /// n >= 2 and m >= 1, plus TrainConfig::validate.
  void validate() const;
};

/// Truncation far beyond any word length: trains on whole words.
inline constexpr Truncation kFullWordTruncation{1u << 20, 1u << 20};

struct JoinerModel {
  nn::Seq2SeqModel net;
  Truncation trunc;
};

TruncationPlan truncate_pair(std::string_view w1, std::string_view w2, const JoinerConfig& cfg);

/// prefix ++ decode(t1 "+" t2) ++ suffix. Throws Error{VocabMiss} or
/// Error{MalformedDecode} when the decoded core is empty or contains '+'.
std::string join(const nn::Seq2SeqModel& model, std::string_view w1, std::string_view w2,
                 Truncation trunc = {});
std::string join(const JoinerModel& model, std::string_view w1, std::string_view w2);

struct JoinerTraining {
  JoinerModel model;
  nn::History history;
};

/// Builds the vocabulary from train + validation examples and trains on
/// (t1 "+" t2 -> "&" core "$"). Throws Error{EmptyDataset}.
JoinerTraining train_joiner(std::span<const SandhiTriple> train, std::span<const SandhiTriple> validation,
                            const JoinerConfig& cfg, const nn::EpochCallback& on_epoch = {});

void save_joiner(const JoinerModel& model, const std::filesystem::path& path);
JoinerModel load_joiner(const std::filesystem::path& path);

}  // namespace sandhi
