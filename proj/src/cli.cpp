#include "sandhi/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <set>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "sandhi/checkpoint.hpp"
#include "sandhi/oracle.hpp"
#include "sandhi/translit.hpp"

namespace sandhi {
namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig:
      return kExitUsage;
    case ErrorCode::BadMagic:
    case ErrorCode::VersionMismatch:
    case ErrorCode::ChecksumMismatch:
    case ErrorCode::KindMismatch:
    case ErrorCode::VocabMiss:
    case ErrorCode::DimensionMismatch:
      return kExitModel;
    default:
      return kExitData;
  }
}

nlohmann::json EvalReport::to_json() const {
  json m = json::object();
  for (const auto& [name, c] : metrics) {
    m[name] = {{"total", c.total}, {"correct", c.correct}, {"accuracy", c.accuracy()}};
  }
  json f = json::array();
  for (const auto& x : failures) f.push_back({{"input", x.input}, {"expected", x.expected}, {"predicted", x.predicted}});
  return {{"kind", kind}, {"total", total}, {"correct", correct}, {"accuracy", accuracy}, {"metrics", m},
          {"failures", f}};
}

std::string EvalReport::table() const {
  std::ostringstream s;
  s << "kind: " << kind << '\n';
  s << std::left << std::setw(14) << "metric" << std::right << std::setw(9) << "correct" << std::setw(9) << "total"
    << std::setw(11) << "accuracy" << '\n';
  for (const auto& [name, c] : metrics) {
    s << std::left << std::setw(14) << name << std::right << std::setw(9) << c.correct << std::setw(9) << c.total
      << std::setw(11) << std::fixed << std::setprecision(6) << c.accuracy() << '\n';
  }
  return s.str();
}

namespace {

void add_failure(EvalReport& r, EvalFailure f) {
  if (r.failures.size() < EvalReport::kMaxFailureSamples) r.failures.push_back(std::move(f));
}

void finish(EvalReport& r, const std::string& headline) {
  const MetricCount& c = r.metrics[headline];
  r.total = c.total;
  r.correct = c.correct;
  r.accuracy = c.accuracy();
}

}  // namespace

EvalReport evaluate_joiner(const JoinerModel& model, std::span<const SandhiTriple> test) {
  EvalReport r;
  r.kind = "join";
  MetricCount& em = r.metrics["exact_match"];
  for (const auto& t : test) {
    ++em.total;
    std::string predicted;
    try {
      predicted = join(model, t.w1, t.w2);
    } catch (const Error& e) {
      predicted = "ERR " + std::string(to_string(e.code()));
    }
    if (predicted == t.cw) {
      ++em.correct;
    } else {
      add_failure(r, {t.w1 + " + " + t.w2, t.cw, predicted});
    }
  }
  finish(r, "exact_match");
  return r;
}

bool split_matches(const SandhiTriple& gold, std::string_view pw1, std::string_view pw2) {
  // both words must match; a correct concatenation alone is a failure
  return pw1 == gold.w1 && pw2 == gold.w2;
}

EvalReport evaluate_splitter(const nn::TaggerModel& tagger, const nn::Seq2SeqModel& wsplitter,
                             std::span<const SandhiTriple> test, std::size_t width) {
  EvalReport r;
  r.kind = "split";
  MetricCount& loc = r.metrics["location"];
  MetricCount& spl = r.metrics["split"];
  for (const auto& t : test) {
    ++loc.total;
    ++spl.total;
    std::optional<WindowSpan> gold;
    if (filter_triple(t).retained) gold = gold_window(t, width);
    std::string predicted;
    bool matched = false;
    try {
      const SplitResult s = split(tagger, wsplitter, t.cw, width);
      if (gold && s.window == *gold) ++loc.correct;
      matched = split_matches(t, s.pw1, s.pw2);
      predicted = s.pw1 + " + " + s.pw2;
    } catch (const Error& e) {
      // a failed Stage 2 still leaves a Stage 1 answer to score
      if (gold && e.code() != ErrorCode::WordTooShort && e.code() != ErrorCode::VocabMiss &&
          predict_window(tagger, t.cw, width) == *gold) {
        ++loc.correct;
      }
      predicted = "ERR " + std::string(to_string(e.code()));
    }
    if (matched) {
      ++spl.correct;
    } else {
      add_failure(r, {t.cw, t.w1 + " + " + t.w2, predicted});
    }
  }
  finish(r, "split");
  return r;
}

namespace {

struct ScriptIo {
  std::string script = "slp1";

  bool deva() const { return script == "devanagari"; }
  std::string in(std::string_view s) const { return deva() ? devanagari_to_slp1(s) : std::string(s); }
  std::string out(std::string_view s) const { return deva() ? slp1_to_devanagari(s) : std::string(s); }
  Script corpus_script() const { return deva() ? Script::Devanagari : Script::Slp1; }
};

void add_script_option(CLI::App* cmd, ScriptIo& io) {
  cmd->add_option("--script", io.script, "Script of text inputs and outputs")
      ->check(CLI::IsMember({"slp1", "devanagari"}))
      ->capture_default_str();
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  return out;
}

std::vector<std::string> fields(std::string_view line, std::string_view seps) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (seps.find(c) != std::string_view::npos) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::vector<SandhiTriple> read_triples(const fs::path& path, Script script, std::ostream& err) {
  ParsedCorpus pc = parse_corpus(path, script);
  if (!pc.diagnostics.empty()) {
    err << path.string() << ": skipped " << pc.diagnostics.size() << " malformed line(s)\n";
  }
  return std::move(pc.triples);
}

// ---- synth ---------------------------------------------------------------

struct SynthArgs {
  std::string lexicon;
  std::size_t count = 5000;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  const Lexicon lex = a.lexicon.empty() ? bundled_lexicon() : load_lexicon(a.lexicon);
  const auto triples = generate_synthetic(lex, a.count, a.seed);
  write_triples(a.out, triples);
  out << "wrote " << triples.size() << " triples to " << a.out << '\n';
  return kExitOk;
}

// ---- prepare -------------------------------------------------------------

struct PrepareArgs {
  std::string corpus;
  std::string out;
  std::uint64_t seed = 1;
  std::size_t n = 5;
  std::size_t m = 2;
  std::size_t window_width = kWindowWidth;
  bool dedup = false;
  ScriptIo io;
};

void write_stage(const fs::path& path, std::span<const TrainingExample> examples) {
  auto f = open_out(path);
  for (const auto& ex : examples) {
    f << ex.input << '\t';
    if (ex.labels.empty()) {
      f << ex.target;
    } else {
      for (float l : ex.labels) f << (l > 0.5F ? '1' : '0');
    }
    f << '\n';
  }
}

int cmd_prepare(const PrepareArgs& a, std::ostream& out, std::ostream& err) {
  ParsedCorpus pc = parse_corpus(a.corpus, a.io.corpus_script());
  json diag_kinds = json::object();
  for (const auto& d : pc.diagnostics) {
    auto& slot = diag_kinds[std::string(to_string(d.kind))];
    slot = slot.is_null() ? 1 : slot.get<int>() + 1;
  }

  std::map<std::string, std::size_t> discarded;
  std::vector<SandhiTriple> retained;
  std::set<SandhiTriple> seen;
  for (auto& t : pc.triples) {
    if (a.dedup && !seen.insert(t).second) {
      ++discarded["Duplicate"];
      continue;
    }
    const FilterVerdict v = filter_triple(t);
    if (v.retained) {
      retained.push_back(std::move(t));
    } else {
      ++discarded[std::string(to_string(v.reason))];
    }
  }
  if (retained.empty()) {
    err << "no usable triples (" << pc.diagnostics.size() << " malformed line(s), " << pc.triples.size()
        << " filtered)\n";
    throw Error(ErrorCode::EmptyDataset, "corpus " + a.corpus + " has no retained triples");
  }

  // avagraha marks an elided vowel; kept in the data but listed for a human to check
  std::vector<SandhiTriple> review;
  for (const auto& t : retained) {
    if ((t.w1 + t.w2 + t.cw).find('\'') != std::string::npos) review.push_back(t);
  }

  const auto split = split_dataset(std::move(retained), a.seed);
  const fs::path dir(a.out);
  fs::create_directories(dir);
  write_triples(dir / "review_avagraha.tsv", review);
  const Truncation trunc{a.n, a.m};
  const std::array<std::pair<const char*, const std::vector<SandhiTriple>*>, 3> parts{
      {{"train", &split.train}, {"val", &split.validation}, {"test", &split.test}}};
  for (const auto& [name, triples] : parts) {
    write_triples(dir / (std::string(name) + ".tsv"), *triples);
    std::vector<AnnotatedTriple> plain;
    for (const auto& t : *triples) plain.push_back({t, {}});
    write_stage(dir / ("joiner_" + std::string(name) + ".tsv"), make_stage_examples(plain, StageKind::Joiner, trunc));
    const auto widened = annotate_all(*triples, a.window_width);
    write_stage(dir / ("stage1_" + std::string(name) + ".tsv"), make_stage_examples(widened, StageKind::Tagger));
    write_stage(dir / ("stage2_" + std::string(name) + ".tsv"),
                make_stage_examples(widened, StageKind::WindowSplitter));
  }

  json disc = json::object();
  std::size_t total_discarded = 0;
  for (const auto& [k, v] : discarded) {
    disc[k] = v;
    total_discarded += v;
  }
  const json manifest{
      {"source", fs::path(a.corpus).filename().string()},
      {"seed", a.seed},
      {"parsed_triples", pc.triples.size()},
      {"malformed_lines", pc.diagnostics.size()},
      {"malformed_by_kind", diag_kinds},
      {"retained", split.train.size() + split.validation.size() + split.test.size()},
      {"discarded", disc},
      {"counts", {{"train", split.train.size()}, {"validation", split.validation.size()}, {"test", split.test.size()}}},
      {"truncation", {{"n", a.n}, {"m", a.m}}},
      {"window_width", a.window_width},
      {"avagraha_review", review.size()},
  };
  open_out(dir / "manifest.json") << manifest.dump(2) << '\n';

  out << "malformed lines: " << pc.diagnostics.size() << '\n';
  out << "discarded: " << total_discarded << '\n';
  for (const auto& [k, v] : discarded) out << "  " << k << ": " << v << '\n';
  if (!review.empty()) out << "flagged for review (avagraha): " << review.size() << '\n';
  out << "train/val/test: " << split.train.size() << '/' << split.validation.size() << '/' << split.test.size()
      << '\n';
  return kExitOk;
}

// ---- train ---------------------------------------------------------------

struct TrainArgs {
  std::string kind;
  std::string data;
  std::string out;
  std::string config;
  std::string history;
  std::optional<int> hidden, batch, epochs;
  std::optional<double> lr;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n, m, window_width;
  bool quiet = false;
  bool dry_run = false;
};

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  const bool joiner = a.kind == "joiner";
  nn::TrainConfig cfg = joiner                 ? default_joiner_train_config()
                        : a.kind == "tagger"   ? default_tagger_train_config()
                                               : default_wsplitter_train_config();
  std::size_t n = 5, m = 2, width = kWindowWidth;

  if (!a.config.empty()) {
    std::ifstream f(a.config);
    if (!f) throw Error(ErrorCode::IoError, "cannot read config " + a.config);
    json j;
    try {
      j = json::parse(f);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::InvalidConfig, std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
    auto take_size = [&](const char* key, std::size_t& dst) {
      if (!j.contains(key)) return;
      if (!j[key].is_number_unsigned()) throw Error(ErrorCode::InvalidConfig, std::string(key) + " must be a count");
      dst = j[key].get<std::size_t>();
      j.erase(key);
    };
    if (joiner) {
      take_size("n", n);
      take_size("m", m);
    } else {
      take_size("window_width", width);
    }
    cfg = train_config_from_json(j, cfg);
  }
  if (a.hidden) cfg.hidden_size = *a.hidden;
  if (a.batch) cfg.batch_size = *a.batch;
  if (a.epochs) cfg.epochs = *a.epochs;
  if (a.lr) cfg.learning_rate = *a.lr;
  if (a.seed) cfg.seed = *a.seed;
  if (a.n) n = *a.n;
  if (a.m) m = *a.m;
  if (a.window_width) width = *a.window_width;
  cfg.validate();
  if (width < 2) throw Error(ErrorCode::InvalidConfig, "window_width must be at least 2");

  json echo{{"kind", a.kind}, {"train", to_json(cfg)}};
  if (joiner) {
    echo["n"] = n;
    echo["m"] = m;
  } else {
    echo["window_width"] = width;
  }
  out << echo.dump() << '\n';
  if (a.dry_run) return kExitOk;

  const fs::path dir(a.data);
  const auto train = read_triples(dir / "train.tsv", Script::Slp1, err);
  std::vector<SandhiTriple> val;
  if (fs::exists(dir / "val.tsv")) val = read_triples(dir / "val.tsv", Script::Slp1, err);

  const fs::path history_path = a.history.empty() ? fs::path(a.out + ".history.csv") : fs::path(a.history);
  auto progress = [&](const nn::EpochStats& s) {
    if (!a.quiet) err << "epoch " << s.epoch << " train " << s.train_loss << " val " << s.val_loss << '\n';
  };

  nn::History history;
  if (joiner) {
    JoinerConfig jc;
    jc.trunc = {n, m};
    jc.train = cfg;
    auto result = train_joiner(train, val, jc, progress);
    save_joiner(result.model, a.out);
    history = std::move(result.history);
  } else if (a.kind == "tagger") {
    auto result = train_stage1(train, val, TaggerConfig{cfg, width}, progress);
    save_tagger(result.model, a.out, width);
    history = std::move(result.history);
  } else {
    auto result = train_stage2(train, val, SplitterConfig{cfg, width}, progress);
    save_wsplitter(result.model, a.out, width);
    history = std::move(result.history);
  }

  auto h = open_out(history_path);
  h << "epoch,train_loss,val_loss\n" << std::setprecision(9);
  for (const auto& s : history) h << s.epoch << ',' << s.train_loss << ',' << s.val_loss << '\n';
  out << "saved " << a.out << '\n';
  return kExitOk;
}

// ---- join / split ----------------------------------------------------------

struct PredictArgs {
  std::vector<std::string> words;
  std::string input;
  std::string output;
  std::string model;
  std::string tagger;
  std::string wsplitter;
  ScriptIo io;
};

std::string error_line(const Error& e) { return std::string("ERR ") + e.what(); }

template <typename Fn>
int run_predict(const PredictArgs& a, std::size_t single_arity, Fn predict, std::ostream& out) {
  if (a.input.empty()) {
    if (a.words.size() != single_arity) {
      throw CLI::ValidationError("expected " + std::to_string(single_arity) + " word(s) or --input");
    }
    std::vector<std::string> words;
    for (const auto& w : a.words) words.push_back(a.io.in(w));
    out << predict(words) << '\n';
    return kExitOk;
  }
  std::ofstream file;
  if (!a.output.empty()) file = open_out(a.output);
  std::ostream& dst = a.output.empty() ? out : file;
  for (const auto& line : read_lines(a.input)) {
    try {
      auto words = fields(a.io.in(line), single_arity == 2 ? " \t+" : " \t");
      if (words.size() != single_arity) {
        dst << "ERR malformed line: expected " << single_arity << " field(s)\n";
        continue;
      }
      dst << predict(words) << '\n';
    } catch (const Error& e) {
      dst << error_line(e) << '\n';
    }
  }
  return kExitOk;
}

int cmd_join(const PredictArgs& a, std::ostream& out) {
  const JoinerModel model = load_joiner(a.model);
  return run_predict(
      a, 2, [&](const std::vector<std::string>& w) { return a.io.out(join(model, w[0], w[1])); }, out);
}

int cmd_split(const PredictArgs& a, std::ostream& out) {
  json extra;
  const nn::TaggerModel tagger = load_tagger(a.tagger, &extra);
  const std::size_t width = extra.value("window_width", kWindowWidth);
  const nn::Seq2SeqModel wsplit = load_seq2seq(a.wsplitter, "wsplitter");
  return run_predict(
      a, 1,
      [&](const std::vector<std::string>& w) {
        const SplitResult r = split(tagger, wsplit, w[0], width);
        return a.io.out(r.pw1) + " + " + a.io.out(r.pw2);
      },
      out);
}

// ---- eval ----------------------------------------------------------------

struct EvalArgs {
  std::string kind;
  std::string model;
  std::string tagger;
  std::string wsplitter;
  std::string test;
  std::string report;
  std::string failures;
  ScriptIo io;
};

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  EvalReport report;
  if (a.kind == "join") {
    if (a.model.empty()) throw CLI::ValidationError("eval join needs --model");
    const JoinerModel model = load_joiner(a.model);
    report = evaluate_joiner(model, read_triples(a.test, a.io.corpus_script(), err));
  } else {
    if (a.tagger.empty() || a.wsplitter.empty()) throw CLI::ValidationError("eval split needs --tagger and --wsplitter");
    json extra;
    const nn::TaggerModel tagger = load_tagger(a.tagger, &extra);
    const nn::Seq2SeqModel wsplit = load_seq2seq(a.wsplitter, "wsplitter");
    report = evaluate_splitter(tagger, wsplit, read_triples(a.test, a.io.corpus_script(), err),
                               extra.value("window_width", kWindowWidth));
  }
  out << report.table();
  if (!a.report.empty()) open_out(a.report) << report.to_json().dump(2) << '\n';
  std::string sidecar = a.failures;
  if (sidecar.empty() && !a.report.empty()) sidecar = a.report + ".failures.tsv";
  if (!sidecar.empty()) {
    auto f = open_out(sidecar);
    f << "input\texpected\tpredicted\n";
    for (const auto& x : report.failures) f << x.input << '\t' << x.expected << '\t' << x.predicted << '\n';
  }
  return kExitOk;
}

// ---- translit --------------------------------------------------------------

struct TranslitArgs {
  std::string from = "devanagari";
  std::string to = "slp1";
  std::vector<std::string> text;
  std::string input;
};

int cmd_translit(const TranslitArgs& a, std::ostream& out) {
  auto convert = [&](std::string_view s) {
    std::string slp = a.from == "slp1" ? std::string(s) : a.from == "itrans" ? itrans_to_slp1(s) : devanagari_to_slp1(s);
    return a.to == "devanagari" ? slp1_to_devanagari(slp) : slp;
  };
  if (a.input.empty()) {
    if (a.text.empty()) throw CLI::ValidationError("nothing to transliterate");
    for (const auto& t : a.text) out << convert(t) << '\n';
    return kExitOk;
  }
  for (const auto& line : read_lines(a.input)) out << convert(line) << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sanskrit sandhi joining and splitting", "sandhi"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Generate a rule-based synthetic corpus");
  c_synth->add_option("--lexicon", synth.lexicon, "Lexicon file (default: bundled)");
  c_synth->add_option("--count", synth.count, "Number of triples")->capture_default_str();
  c_synth->add_option("--seed", synth.seed, "Sampling seed")->capture_default_str();
  c_synth->add_option("--out", synth.out, "Output TSV")->required();

  PrepareArgs prep;
  auto* c_prep = app.add_subcommand("prepare", "Filter, annotate and split a corpus");
  c_prep->add_option("--corpus", prep.corpus, "Corpus TSV (w1, w2, compound)")->required();
  c_prep->add_option("--out", prep.out, "Output directory")->required();
  c_prep->add_option("--seed", prep.seed, "Split seed")->capture_default_str();
  c_prep->add_option("--n", prep.n, "Joiner truncation: chars kept from w1")->capture_default_str();
  c_prep->add_option("--m", prep.m, "Joiner truncation: chars kept from w2")->capture_default_str();
  c_prep->add_option("--window-width", prep.window_width, "Widened window length")->capture_default_str();
  c_prep->add_flag("--dedup", prep.dedup, "Drop repeated triples");
  add_script_option(c_prep, prep.io);

  TrainArgs train;
  auto* c_train = app.add_subcommand("train", "Train a joiner, tagger or window splitter");
  c_train->add_option("kind", train.kind, "Model kind")
      ->required()
      ->check(CLI::IsMember({"joiner", "tagger", "wsplitter"}));
  c_train->add_option("--data", train.data, "Directory written by prepare")->required();
  c_train->add_option("--out", train.out, "Checkpoint path")->required();
  c_train->add_option("--config", train.config, "JSON training config");
  c_train->add_option("--history", train.history, "Loss CSV (default: <out>.history.csv)");
  c_train->add_option("--hidden", train.hidden, "Hidden units");
  c_train->add_option("--batch", train.batch, "Batch size");
  c_train->add_option("--epochs", train.epochs, "Epochs");
  c_train->add_option("--lr", train.lr, "Learning rate");
  c_train->add_option("--seed", train.seed, "Seed for initialization and shuffling");
  c_train->add_option("--n", train.n, "Joiner truncation n");
  c_train->add_option("--m", train.m, "Joiner truncation m");
  c_train->add_option("--window-width", train.window_width, "Window length for tagger / wsplitter");
  c_train->add_flag("--quiet", train.quiet, "No per-epoch progress");
  c_train->add_flag("--dry-run", train.dry_run, "Print the resolved config and stop");

  PredictArgs join_a;
  auto* c_join = app.add_subcommand("join", "Join two words");
  c_join->add_option("words", join_a.words, "w1 w2");
  c_join->add_option("--model", join_a.model, "Joiner checkpoint")->required();
  c_join->add_option("--input", join_a.input, "File of 'w1 w2' lines");
  c_join->add_option("--output", join_a.output, "Output file for --input");
  add_script_option(c_join, join_a.io);

  PredictArgs split_a;
  auto* c_split = app.add_subcommand("split", "Split a compound");
  c_split->add_option("words", split_a.words, "compound");
  c_split->add_option("--tagger", split_a.tagger, "Tagger checkpoint")->required();
  c_split->add_option("--wsplitter", split_a.wsplitter, "Window splitter checkpoint")->required();
  c_split->add_option("--input", split_a.input, "File of compounds, one per line");
  c_split->add_option("--output", split_a.output, "Output file for --input");
  add_script_option(c_split, split_a.io);

  EvalArgs eval;
  auto* c_eval = app.add_subcommand("eval", "Score models on a test TSV");
  c_eval->add_option("kind", eval.kind, "join or split")->required()->check(CLI::IsMember({"join", "split"}));
  c_eval->add_option("--model", eval.model, "Joiner checkpoint");
  c_eval->add_option("--tagger", eval.tagger, "Tagger checkpoint");
  c_eval->add_option("--wsplitter", eval.wsplitter, "Window splitter checkpoint");
  c_eval->add_option("--test", eval.test, "Test TSV")->required();
  c_eval->add_option("--report", eval.report, "JSON report path");
  c_eval->add_option("--failures", eval.failures, "Failure sample TSV (default: <report>.failures.tsv)");
  add_script_option(c_eval, eval.io);

  TranslitArgs tr;
  auto* c_tr = app.add_subcommand("translit", "Convert between Devanagari, ITRANS and SLP1");
  c_tr->add_option("text", tr.text, "Text to convert");
  c_tr->add_option("--from", tr.from, "Source script")
      ->check(CLI::IsMember({"devanagari", "slp1", "itrans"}))
      ->capture_default_str();
  c_tr->add_option("--to", tr.to, "Target script")->check(CLI::IsMember({"devanagari", "slp1"}))->capture_default_str();
  c_tr->add_option("--input", tr.input, "File to convert line by line");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (c_synth->parsed()) return cmd_synth(synth, out);
    if (c_prep->parsed()) return cmd_prepare(prep, out, err);
    if (c_train->parsed()) return cmd_train(train, out, err);
    if (c_join->parsed()) return cmd_join(join_a, out);
    if (c_split->parsed()) return cmd_split(split_a, out);
    if (c_eval->parsed()) return cmd_eval(eval, out, err);
    if (c_tr->parsed()) return cmd_translit(tr, out);
  } catch (const CLI::Error& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace sandhi
