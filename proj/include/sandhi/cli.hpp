#pragma once

// `sandhi` command-line tool: prepare | train | join | split | eval | translit | synth.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data error,
// 3 model or vocabulary incompatibility.

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "sandhi/corpus.hpp"
#include "sandhi/error.hpp"
#include "sandhi/joiner.hpp"
#include "sandhi/splitter.hpp"

namespace sandhi {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitModel = 3 };

int exit_code_for(ErrorCode code);

struct MetricCount {
  std::size_t total = 0;
  std::size_t correct = 0;
  double accuracy() const { return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total); }
};

struct EvalFailure {
  std::string input;
  std::string expected;
  std::string predicted;
};

/// `total`/`correct` are the headline metric: exact_match for join, split for
/// split. Failure samples keep at most `kMaxFailureSamples` entries.
struct EvalReport {
  static constexpr std::size_t kMaxFailureSamples = 50;

  std::string kind;
  std::size_t total = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;
  std::map<std::string, MetricCount> metrics;
  std::vector<EvalFailure> failures;

  nlohmann::json to_json() const;
  std::string table() const;
};

/// Whole-compound exact match; a decode error counts as a failure.
EvalReport evaluate_joiner(const JoinerModel& model, std::span<const SandhiTriple> test);

bool split_matches(const SandhiTriple& gold, std::string_view pw1, std::string_view pw2);

/// Location: predicted span == gold span. Split: both words equal the gold
/// words.
EvalReport evaluate_splitter(const nn::TaggerModel& tagger, const nn::Seq2SeqModel& wsplitter,
                             std::span<const SandhiTriple> test, std::size_t width = kWindowWidth);

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sandhi
