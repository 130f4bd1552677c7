#include <gtest/gtest.h>

#include <filesystem>
#include <string>
#include <vector>

#include "sandhi/checkpoint.hpp"
#include "sandhi/error.hpp"
#include "sandhi/oracle.hpp"
#include "sandhi/random.hpp"
#include "sandhi/splitter.hpp"

using namespace sandhi;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidConfig;
}

const std::vector<SandhiTriple> kExamples{
    {"tat", "upAsanIyam", "tadupAsanIyam"},
    {"vidyA", "AlayaH", "vidyAlayaH"},
    {"punaH", "api", "punarapi"},
};

WindowSpan naive_best(const std::vector<float>& s, std::size_t width) {
  const std::size_t len = std::min(width, s.size());
  WindowSpan best{0, len, -1.0};
  for (std::size_t start = 0; start + len <= s.size(); ++start) {
    double sum = 0.0;
    for (std::size_t k = 0; k < len; ++k) sum += s[start + k];
    if (start == 0 || sum > best.score) best = {start, len, sum};
  }
  return best;
}

nn::Seq2SeqModel zero_seq2seq(const std::string& letters) {
  const std::vector<std::string> seqs{letters};
  nn::TrainConfig c;
  c.hidden_size = 3;
  auto m = nn::make_seq2seq(Vocabulary::build(seqs), c);
  nn::for_each_matrix(m.params, [](nn::Matrix<float>& x) { x.setZero(); });
  return m;
}

nn::TaggerModel small_tagger(const std::string& letters) {
  const std::vector<std::string> seqs{letters};
  nn::TrainConfig c;
  c.hidden_size = 4;
  return nn::make_tagger(Vocabulary::build(seqs), c);
}

std::vector<SandhiTriple> with_examples(std::size_t synthetic, std::uint64_t seed) {
  std::vector<SandhiTriple> out = kExamples;
  for (const auto& t : generate_synthetic(bundled_lexicon(), synthetic, seed)) out.push_back(t);
  return out;
}

struct StageAccuracy {
  double location = 0.0;
  double window_split = 0.0;
  double split = 0.0;
};

StageAccuracy measure(const nn::TaggerModel& tagger, const nn::Seq2SeqModel& ws, const std::vector<SandhiTriple>& set) {
  std::size_t loc = 0, wsplit = 0, full = 0;
  for (const auto& t : set) {
    const WindowAnnotation gold = widen_window(t, annotate_window(t));
    if (predict_window(tagger, t.cw) == gold_window(t)) ++loc;
    try {
      if (split_window(ws, gold.window) == std::pair{gold.tw1, gold.tw2}) ++wsplit;
      const auto r = split(tagger, ws, t.cw);
      if (r.pw1 == t.w1 && r.pw2 == t.w2) ++full;
    } catch (const Error&) {
    }
  }
  const double n = static_cast<double>(set.size());
  return {static_cast<double>(loc) / n, static_cast<double>(wsplit) / n, static_cast<double>(full) / n};
}

}  // namespace

TEST(BestWindow, Examples) {
  const std::vector<float> s{0.1f, 0.2f, 0.9f, 0.8f, 0.9f, 0.7f, 0.9f, 0.1f, 0.05f};
  const auto w = best_window(s);
  EXPECT_EQ(w.start, 2u);
  EXPECT_EQ(w.length, 5u);
  EXPECT_NEAR(w.score, 4.2, 1e-6);
}

TEST(BestWindow, FiveCharsIsWholeWord) {
  const std::vector<float> s{0.9f, 0.0f, 0.1f, 0.0f, 0.3f};
  EXPECT_EQ(best_window(s), (WindowSpan{0, 5, 0.0}));
  const std::vector<float> three{0.1f, 0.2f, 0.3f};
  EXPECT_EQ(best_window(three), (WindowSpan{0, 3, 0.0}));
}

TEST(BestWindow, UniformScoresPickLeftmost) {
  const std::vector<float> s(12, 0.5f);
  EXPECT_EQ(best_window(s).start, 0u);
}

TEST(BestWindow, MatchesBruteForce) {
  Rng rng(5);
  for (int i = 0; i < 5000; ++i) {
    std::vector<float> s(1 + rng.below(20));
    // coarse values make ties common
    for (auto& x : s) x = static_cast<float>(rng.below(4)) * 0.25f;
    for (std::size_t width : {2u, 5u}) {
      const auto got = best_window(s, width);
      const auto want = naive_best(s, width);
      ASSERT_EQ(got, want);
      ASSERT_EQ(got.score, want.score);
    }
  }
}

TEST(GoldWindow, WidenedAnnotation) {
  EXPECT_EQ(gold_window(kExamples[1]), (WindowSpan{2, 5, 0.0}));
  const SandhiTriple short_one{"ca", "iha", "ceha"};
  EXPECT_EQ(gold_window(short_one), (WindowSpan{0, 4, 0.0}));
}

TEST(StageExamples, TaggerAndWindowSplitter) {
  const SandhiTriple t{"sAmAnyaDvaMsAn", "aNgIkArA", "sAmAnyaDvaMsAnyaNgIkArA"};
  const std::vector<AnnotatedTriple> a{{t, annotate_window(t)}};
  const auto tag = make_stage_examples(a, StageKind::Tagger);
  ASSERT_EQ(tag[0].labels.size(), 23u);
  for (std::size_t i = 0; i < 23; ++i) EXPECT_EQ(tag[0].labels[i], (i >= 12 && i <= 16) ? 1.0f : 0.0f) << i;
  const std::vector<AnnotatedTriple> v{{kExamples[1], annotate_window(kExamples[1])}};
  const auto ws = make_stage_examples(v, StageKind::WindowSplitter);
  EXPECT_EQ(ws[0].input, "yAl");
  EXPECT_EQ(ws[0].target, "&yA+Al$");
}

TEST(Errors, WordTooShort) {
  const auto tagger = small_tagger("ab");
  EXPECT_EQ(code_of([&] { predict_window(tagger, "a"); }), ErrorCode::WordTooShort);
  EXPECT_EQ(code_of([&] { predict_window(tagger, ""); }), ErrorCode::WordTooShort);
  EXPECT_EQ(predict_window(tagger, "ab").length, 2u);
}

TEST(Errors, WindowLength) {
  const auto m = zero_seq2seq("abcdef");
  EXPECT_EQ(code_of([&] { split_window(m, "a"); }), ErrorCode::WindowLength);
  EXPECT_EQ(code_of([&] { split_window(m, "abcdef"); }), ErrorCode::WindowLength);
}

TEST(Errors, NoSeparator) {
  const auto m = zero_seq2seq("abc");
  EXPECT_EQ(code_of([&] { split_window(m, "abc"); }), ErrorCode::NoSeparator);
}

TEST(Errors, SeveralSeparators) {
  auto m = zero_seq2seq("abc");
  m.params.out.b(m.vocab.separator_index(), 0) = 10.0f;
  EXPECT_EQ(code_of([&] { split_window(m, "abc"); }), ErrorCode::MalformedDecode);
}

TEST(SplitWindow, OverfitOnUnwidenedWindows) {
  std::vector<TrainingExample> ex{{"yAl", "&yA+Al$", {}}, {"AnaN", "&An+aN$", {}}};
  for (const auto& a : annotate_all(generate_synthetic(bundled_lexicon(), 30, 2))) {
    ex.push_back({a.window.window, "&" + a.window.tw1 + "+" + a.window.tw2 + "$", {}});
  }
  std::vector<std::string> seqs;
  for (const auto& e : ex) {
    seqs.push_back(e.input);
    seqs.push_back(e.target);
  }
  nn::TrainConfig c;
  c.hidden_size = 32;
  c.batch_size = 8;
  c.epochs = 300;
  c.learning_rate = 1e-2;
  auto model = nn::make_seq2seq(Vocabulary::build(seqs), c);
  nn::train_seq2seq(model, ex, {}, c);
  EXPECT_EQ(split_window(model, "yAl"), (std::pair<std::string, std::string>{"yA", "Al"}));
  EXPECT_EQ(split_window(model, "AnaN"), (std::pair<std::string, std::string>{"An", "aN"}));
}

TEST(Split, OverfitStagesRecoverWorkedExamples) {
  const auto set = with_examples(47, 13);
  TaggerConfig tc;
  tc.train.hidden_size = 32;
  tc.train.batch_size = 10;
  tc.train.epochs = 150;
  tc.train.learning_rate = 1e-2;
  SplitterConfig sc;
  sc.train.hidden_size = 32;
  sc.train.batch_size = 10;
  sc.train.epochs = 300;
  sc.train.learning_rate = 1e-2;
  const auto s1 = train_stage1(set, {}, tc);
  const auto s2 = train_stage2(set, {}, sc);
  EXPECT_EQ(s1.history.size(), 150u);
  EXPECT_EQ(s2.history.size(), 300u);
  for (const auto& t : kExamples) {
    const auto r = split(s1.model, s2.model, t.cw);
    EXPECT_EQ(r.pw1, t.w1) << t.cw;
    EXPECT_EQ(r.pw2, t.w2) << t.cw;
  }
  const auto acc = measure(s1.model, s2.model, set);
  EXPECT_EQ(acc.location, 1.0);
  EXPECT_EQ(acc.split, 1.0);

  const auto dir = std::filesystem::temp_directory_path();
  save_tagger(s1.model, dir / "sandhi_t.ckpt");
  save_wsplitter(s2.model, dir / "sandhi_w.ckpt");
  nlohmann::json extra;
  const auto tagger = load_tagger(dir / "sandhi_t.ckpt", &extra);
  EXPECT_EQ(extra["window_width"], 5);
  const auto ws = load_seq2seq(dir / "sandhi_w.ckpt", "wsplitter");
  EXPECT_EQ(split(tagger, ws, "punarapi").pw1, "punaH");

  std::size_t checked = 0;
  for (const auto& t : generate_synthetic(bundled_lexicon(), 300, 77)) {
    SplitResult r;
    try {
      r = split(tagger, ws, t.cw);
    } catch (const Error&) {
      continue;
    }
    ++checked;
    EXPECT_EQ(r.window.length, std::min<std::size_t>(5, t.cw.size()));
    EXPECT_EQ(r.nw1, t.cw.substr(0, r.window.start));
    EXPECT_EQ(r.nw2, t.cw.substr(r.window.start + r.window.length));
    EXPECT_EQ(r.pw1, r.nw1 + r.ps1);
    EXPECT_EQ(r.pw2, r.ps2 + r.nw2);
  }
  EXPECT_GT(checked, 100u);
  std::filesystem::remove(dir / "sandhi_t.ckpt");
  std::filesystem::remove(dir / "sandhi_w.ckpt");
}

TEST(TrainStages, ToySetOfTwoHundred) {
  const auto set = generate_synthetic(bundled_lexicon(), 200, 31);
  TaggerConfig tc;
  tc.train.hidden_size = 32;
  tc.train.batch_size = 16;
  tc.train.epochs = 60;
  tc.train.learning_rate = 1e-2;
  SplitterConfig sc;
  sc.train.hidden_size = 32;
  sc.train.batch_size = 16;
  sc.train.epochs = 80;
  sc.train.learning_rate = 1e-2;
  const auto s1 = train_stage1(set, {}, tc);
  const auto s2 = train_stage2(set, {}, sc);
  const auto acc = measure(s1.model, s2.model, set);
  EXPECT_GE(acc.location, 0.9);
  EXPECT_GE(acc.window_split, 0.9);
}

TEST(TrainStages, DeterministicWithHistory) {
  const auto set = generate_synthetic(bundled_lexicon(), 60, 3);
  const std::vector<SandhiTriple> train(set.begin(), set.begin() + 48);
  const std::vector<SandhiTriple> val(set.begin() + 48, set.end());
  TaggerConfig tc;
  tc.train.hidden_size = 8;
  tc.train.epochs = 3;
  SplitterConfig sc;
  sc.train.hidden_size = 8;
  sc.train.epochs = 2;
  const auto a = train_stage1(train, val, tc);
  const auto b = train_stage1(train, val, tc);
  ASSERT_EQ(a.history.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(a.history[i].val_loss, b.history[i].val_loss);
  EXPECT_EQ(serialize_checkpoint({"tagger", {}, a.model}), serialize_checkpoint({"tagger", {}, b.model}));
  const auto c = train_stage2(train, val, sc);
  const auto d = train_stage2(train, val, sc);
  EXPECT_EQ(c.history.size(), 2u);
  EXPECT_EQ(serialize_checkpoint({"wsplitter", {}, c.model}), serialize_checkpoint({"wsplitter", {}, d.model}));
}

TEST(TrainStages, EmptyDataset) {
  EXPECT_EQ(code_of([] { train_stage1({}, {}, TaggerConfig{}); }), ErrorCode::EmptyDataset);
  EXPECT_EQ(code_of([] { train_stage2({}, {}, SplitterConfig{}); }), ErrorCode::EmptyDataset);
}

TEST(Defaults, StageHyperparameters) {
  EXPECT_EQ(TaggerConfig{}.train.hidden_size, 64);
  EXPECT_EQ(TaggerConfig{}.train.epochs, 40);
  EXPECT_EQ(SplitterConfig{}.train.hidden_size, 128);
  EXPECT_EQ(SplitterConfig{}.train.epochs, 30);
  EXPECT_EQ(SplitterConfig{}.train.batch_size, 64);
  EXPECT_DOUBLE_EQ(SplitterConfig{}.train.learning_rate, 1e-3);
}
