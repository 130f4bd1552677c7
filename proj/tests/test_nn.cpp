#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "sandhi/corpus.hpp"
#include "sandhi/error.hpp"
#include "sandhi/nn.hpp"

using namespace sandhi;
using namespace sandhi::nn;

namespace {

LstmParams<double> random_lstm(Eigen::Index in, Eigen::Index hidden, unsigned seed) {
  std::srand(seed);
  LstmParams<double> p;
  p.W = Matrix<double>::Random(4 * hidden, in);
  p.U = Matrix<double>::Random(4 * hidden, hidden);
  p.b = Matrix<double>::Random(4 * hidden, 1);
  return p;
}

double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Vocabulary vocab_of(std::initializer_list<std::string> seqs) {
  std::vector<std::string> v(seqs);
  return Vocabulary::build(v);
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidConfig;
}

std::vector<TrainingExample> toy_seq_examples() {
  return {{"ab+c", "&abc$", {}}, {"ca+b", "&cab$", {}}, {"b+ba", "&bba$", {}}, {"a+a", "&A$", {}}};
}

}  // namespace

TEST(LstmStep, ZeroParamsGiveZeroState) {
  LstmParams<double> p;
  p.W = Matrix<double>::Zero(8, 3);
  p.U = Matrix<double>::Zero(8, 2);
  p.b = Matrix<double>::Zero(8, 1);
  const Vector<double> x = Vector<double>::Ones(3);
  const LstmState<double> s0{Vector<double>::Zero(2), Vector<double>::Zero(2)};
  const auto s = lstm_step(p, x, s0);
  EXPECT_TRUE(s.h.isZero());
  EXPECT_TRUE(s.c.isZero());
}

TEST(LstmStep, MatchesScalarReference) {
  const auto p = random_lstm(3, 2, 7);
  Vector<double> x(3);
  x << 0.3, -1.2, 0.7;
  LstmState<double> s0{Vector<double>(2), Vector<double>(2)};
  s0.h << 0.1, -0.4;
  s0.c << 0.5, 0.2;
  const auto s = lstm_step(p, x, s0);

  for (int j = 0; j < 2; ++j) {
    std::array<double, 4> pre{};
    for (int gate = 0; gate < 4; ++gate) {
      const int r = gate * 2 + j;
      double acc = p.b(r, 0);
      for (int k = 0; k < 3; ++k) acc += p.W(r, k) * x(k);
      for (int k = 0; k < 2; ++k) acc += p.U(r, k) * s0.h(k);
      pre[gate] = acc;
    }
    const double c = sig(pre[1]) * s0.c(j) + sig(pre[0]) * std::tanh(pre[2]);
    const double h = sig(pre[3]) * std::tanh(c);
    EXPECT_NEAR(s.c(j), c, 1e-12);
    EXPECT_NEAR(s.h(j), h, 1e-12);
  }
}

TEST(LstmStep, HiddenStaysInsideUnitInterval) {
  const auto p = random_lstm(4, 5, 3);
  LstmState<double> s{Vector<double>::Zero(5), Vector<double>::Zero(5)};
  for (int t = 0; t < 50; ++t) {
    s = lstm_step<double>(p, Vector<double>::Random(4) * 10.0, s);
    EXPECT_LT(s.h.cwiseAbs().maxCoeff(), 1.0);
  }
}

TEST(LstmStep, DimensionMismatch) {
  const auto p = random_lstm(3, 2, 1);
  const LstmState<double> s{Vector<double>::Zero(2), Vector<double>::Zero(2)};
  EXPECT_EQ(code_of([&] { lstm_step<double>(p, Vector<double>::Zero(4), s); }), ErrorCode::DimensionMismatch);
  const LstmState<double> bad{Vector<double>::Zero(3), Vector<double>::Zero(2)};
  EXPECT_EQ(code_of([&] { lstm_step<double>(p, Vector<double>::Zero(3), bad); }), ErrorCode::DimensionMismatch);
}

TEST(BiLstm, LengthOneUsesBothDirectionsOnce) {
  const auto f = random_lstm(3, 2, 11);
  const auto b = random_lstm(3, 2, 12);
  const Vector<double> x = Vector<double>::Random(3);
  const auto out = bilstm_encode(f, b, {x});
  ASSERT_EQ(out.outputs.size(), 1u);
  const LstmState<double> zero{Vector<double>::Zero(2), Vector<double>::Zero(2)};
  EXPECT_TRUE(out.outputs[0].head(2).isApprox(lstm_step(f, x, zero).h));
  EXPECT_TRUE(out.outputs[0].tail(2).isApprox(lstm_step(b, x, zero).h));
}

TEST(BiLstm, ReversalSwapsDirections) {
  const auto f = random_lstm(3, 4, 21);
  const auto b = random_lstm(3, 4, 22);
  std::vector<Vector<double>> xs;
  for (int t = 0; t < 6; ++t) xs.push_back(Vector<double>::Random(3));
  std::vector<Vector<double>> rev(xs.rbegin(), xs.rend());
  const auto a = bilstm_encode(f, b, xs);
  const auto r = bilstm_encode(b, f, rev);
  ASSERT_EQ(a.outputs.size(), 6u);
  for (std::size_t t = 0; t < 6; ++t) {
    EXPECT_EQ(a.outputs[t].size(), 8);
    const auto& other = r.outputs[5 - t];
    EXPECT_TRUE(a.outputs[t].head(4).isApprox(other.tail(4)));
    EXPECT_TRUE(a.outputs[t].tail(4).isApprox(other.head(4)));
  }
  EXPECT_TRUE(a.fwd_final.h.isApprox(r.bwd_final.h));
}

TEST(BiLstm, EmptySequence) {
  const auto f = random_lstm(3, 2, 1);
  EXPECT_EQ(code_of([&] { bilstm_encode(f, f, {}); }), ErrorCode::EmptySequence);
}

TEST(RmsProp, HandComputedSteps) {
  Matrix<double> param(1, 1), grad(1, 1), cache(1, 1);
  param << 1.0;
  grad << 0.5;
  cache << 0.0;
  rmsprop_update(param, grad, cache, 0.1, 0.9, 1e-7);
  EXPECT_NEAR(cache(0, 0), 0.025, 1e-15);
  EXPECT_NEAR(param(0, 0), 0.6837724339830356, 1e-12);
  rmsprop_update(param, grad, cache, 0.1, 0.9, 1e-7);
  EXPECT_NEAR(param(0, 0), 0.4543568053755834, 1e-12);
}

TEST(RmsProp, ZeroGradientLeavesParam) {
  Matrix<double> param = Matrix<double>::Constant(2, 2, 3.0);
  Matrix<double> cache = Matrix<double>::Zero(2, 2);
  rmsprop_update<double>(param, Matrix<double>::Zero(2, 2), cache, 0.1, 0.9, 1e-7);
  EXPECT_TRUE(param.isApproxToConstant(3.0));
}

TEST(ClipNorm, ScalesToMaximum) {
  TaggerParams<double> g;
  g.enc_fwd.W = Matrix<double>::Constant(2, 2, 3.0);
  g.enc_fwd.U = Matrix<double>::Zero(2, 1);
  g.enc_fwd.b = Matrix<double>::Zero(2, 1);
  g.enc_bwd = g.enc_fwd;
  g.head.W = Matrix<double>::Zero(1, 2);
  g.head.b = Matrix<double>::Zero(1, 1);
  const double before = clip_global_norm(g, 1.0);
  EXPECT_NEAR(before, std::sqrt(8 * 9.0), 1e-12);
  double sq = 0.0;
  for_each_matrix(g, [&](const Matrix<double>& m) { sq += m.squaredNorm(); });
  EXPECT_NEAR(std::sqrt(sq), 1.0, 1e-12);
}

TEST(GradientCheck, Seq2Seq) {
  const auto r = gradient_check(ModelKind::Seq2Seq);
  EXPECT_LT(r.max_rel_error, 1e-4);
  EXPECT_GT(r.parameters, 100u);
}

TEST(GradientCheck, Tagger) {
  const auto r = gradient_check(ModelKind::Tagger);
  EXPECT_LT(r.max_rel_error, 1e-4);
  EXPECT_GT(r.parameters, 50u);
}

TEST(GradientCheck, OtherSeedsAndSizes) {
  EXPECT_LT(gradient_check(ModelKind::Seq2Seq, {7, 3, 4, 2}, 9).max_rel_error, 1e-4);
  EXPECT_LT(gradient_check(ModelKind::Tagger, {6, 5, 6, 4}, 4).max_rel_error, 1e-4);
}

TEST(GradientCheck, TaggerAtZeroLoss) {
  // targets equal to the model's own outputs: loss and gradient vanish
  auto model = make_tagger(vocab_of({"abc"}), [] {
    TrainConfig c;
    c.hidden_size = 3;
    return c;
  }());
  const auto scores = tag_scores(model, "abca");
  EncodedTag enc{model.vocab.encode("abca"), scores};
  const EncodedTag* items[] = {&enc};
  const auto batch = make_tag_batch(items);
  const auto p = cast_params<double>(model.params);
  auto grad = zeros_like(p);
  EXPECT_LT(tagger_loss(p, batch, &grad), 1e-12);
  double mx = 0.0;
  for_each_matrix(grad, [&](const Matrix<double>& m) { mx = std::max(mx, m.cwiseAbs().maxCoeff()); });
  EXPECT_LT(mx, 1e-6);
}

TEST(GradientCheck, Seq2SeqNearZeroLoss) {
  TrainConfig c;
  c.hidden_size = 3;
  auto model = make_seq2seq(vocab_of({"ab"}), c);
  const int target = model.vocab.index('a');
  model.params.out.b(target, 0) = 60.0f;
  EncodedSeq enc{model.vocab.encode("ab"), {model.vocab.start_index(), target, target}};
  const EncodedSeq* items[] = {&enc};
  const auto batch = make_seq_batch(items);
  const auto p = cast_params<double>(model.params);
  auto grad = zeros_like(p);
  EXPECT_LT(seq2seq_loss(p, batch, &grad), 1e-20);
}

TEST(Decode, SoftmaxRowsSumToOne) {
  TrainConfig c;
  c.hidden_size = 6;
  const auto model = make_seq2seq(vocab_of({"abcd"}), c);
  const auto trace = greedy_decode_trace(model, "abcd");
  ASSERT_FALSE(trace.probs.empty());
  for (const auto& row : trace.probs) {
    EXPECT_EQ(row.size(), model.vocab.size());
    EXPECT_NEAR(std::accumulate(row.begin(), row.end(), 0.0), 1.0, 1e-5);
  }
}

TEST(Decode, ZeroWeightsPickLowestIndexUntilCap) {
  TrainConfig c;
  c.hidden_size = 4;
  c.max_decode_margin = 3;
  auto model = make_seq2seq(vocab_of({"xyz"}), c);
  for_each_matrix(model.params, [](Matrix<float>& m) { m.setZero(); });
  const auto trace = greedy_decode_trace(model, "xy");
  EXPECT_FALSE(trace.reached_end);
  EXPECT_EQ(trace.text, std::string(5, 'x'));
  EXPECT_EQ(trace.probs.size(), 5u);
}

TEST(Decode, EmptyInput) {
  const auto model = make_seq2seq(vocab_of({"ab"}), TrainConfig{});
  EXPECT_EQ(code_of([&] { greedy_decode(model, ""); }), ErrorCode::EmptySequence);
  EXPECT_EQ(code_of([&] { greedy_decode(model, "az"); }), ErrorCode::VocabMiss);
}

TEST(Training, ToyLossDecreases) {
  const auto ex = toy_seq_examples();
  TrainConfig c;
  c.hidden_size = 8;
  c.batch_size = 2;
  c.epochs = 30;
  c.learning_rate = 1e-2;
  auto model = make_seq2seq(vocab_of({"abcA"}), c);
  const auto h = train_seq2seq(model, ex, {}, c);
  ASSERT_EQ(h.size(), 30u);
  EXPECT_LT(h.back().train_loss, h.front().train_loss);
  EXPECT_TRUE(std::isnan(h.back().val_loss));
  EXPECT_EQ(h.back().epoch, 30);
}

TEST(Training, OverfitsSingleExample) {
  const std::vector<TrainingExample> ex{{"ab+c", "&abc$", {}}};
  TrainConfig c;
  c.hidden_size = 16;
  c.batch_size = 1;
  c.epochs = 500;
  c.learning_rate = 1e-2;
  auto model = make_seq2seq(vocab_of({"abc"}), c);
  int solved_at = 0;
  train_seq2seq(model, ex, {}, c, [&](const EpochStats& s) {
    if (solved_at == 0 && greedy_decode(model, "ab+c") == "abc") solved_at = s.epoch;
  });
  EXPECT_GT(solved_at, 0);
  EXPECT_EQ(greedy_decode(model, "ab+c"), "abc");
}

TEST(Training, DeterministicForSeed) {
  const auto ex = toy_seq_examples();
  TrainConfig c;
  c.hidden_size = 6;
  c.batch_size = 3;
  c.epochs = 5;
  auto a = make_seq2seq(vocab_of({"abcA"}), c);
  auto b = make_seq2seq(vocab_of({"abcA"}), c);
  const auto ha = train_seq2seq(a, ex, ex, c);
  const auto hb = train_seq2seq(b, ex, ex, c);
  for (std::size_t i = 0; i < ha.size(); ++i) {
    EXPECT_EQ(ha[i].train_loss, hb[i].train_loss);
    EXPECT_EQ(ha[i].val_loss, hb[i].val_loss);
  }
  zip_matrices(a.params, b.params, [](const Matrix<float>& x, const Matrix<float>& y) { EXPECT_EQ(x, y); });
}

TEST(Training, Errors) {
  TrainConfig c;
  c.epochs = 1;
  auto model = make_seq2seq(vocab_of({"abc"}), c);
  const std::vector<TrainingExample> unframed{{"ab", "ab", {}}};
  EXPECT_EQ(code_of([&] { train_seq2seq(model, unframed, {}, c); }), ErrorCode::InvalidConfig);
  const std::vector<TrainingExample> foreign{{"az", "&a$", {}}};
  EXPECT_EQ(code_of([&] { train_seq2seq(model, foreign, {}, c); }), ErrorCode::VocabMiss);
  TrainConfig bad = c;
  bad.learning_rate = 0.0;
  EXPECT_EQ(code_of([&] { train_seq2seq(model, toy_seq_examples(), {}, bad); }), ErrorCode::InvalidConfig);
  bad = c;
  bad.rho = 1.0;
  EXPECT_EQ(code_of([&] { bad.validate(); }), ErrorCode::InvalidConfig);

  auto tagger = make_tagger(vocab_of({"abc"}), c);
  const std::vector<TrainingExample> short_labels{{"abc", "", {0.0f, 1.0f}}};
  EXPECT_EQ(code_of([&] { train_tagger(tagger, short_labels, {}, c); }), ErrorCode::LengthMismatch);
}

TEST(Training, TaggerLearnsConstantZero) {
  std::vector<TrainingExample> ex;
  for (const char* w : {"abc", "cab", "bca", "aabbc", "ccba"}) {
    ex.push_back({w, "", std::vector<float>(std::string(w).size(), 0.0f)});
  }
  TrainConfig c;
  c.hidden_size = 8;
  c.batch_size = 2;
  c.epochs = 40;
  c.learning_rate = 1e-2;
  auto model = make_tagger(vocab_of({"abc"}), c);
  const auto h = train_tagger(model, ex, {}, c);
  EXPECT_LE(h.front().train_loss, 0.25 + 1e-2);
  EXPECT_LT(h.back().train_loss, 1e-2);
  for (float s : tag_scores(model, "abcabc")) EXPECT_LT(s, 0.2f);
  EXPECT_LT(evaluate_tagger_loss(model, ex), 1e-2);
}

TEST(Models, InitialisationShapes) {
  TrainConfig c;
  c.hidden_size = 5;
  const auto m = make_seq2seq(vocab_of({"abc"}), c);
  const auto V = static_cast<Eigen::Index>(m.vocab.size());
  EXPECT_EQ(V, 7);
  EXPECT_EQ(m.params.enc_fwd.W.rows(), 20);
  EXPECT_EQ(m.params.enc_fwd.W.cols(), V);
  EXPECT_EQ(m.params.bridge.W.rows(), 10);
  EXPECT_EQ(m.params.bridge.W.cols(), 20);
  EXPECT_EQ(m.params.out.W.rows(), V);
  EXPECT_LE(m.params.dec.W.cwiseAbs().maxCoeff(), 0.08f);
  EXPECT_TRUE(m.params.enc_fwd.b.middleRows(5, 5).isOnes());
  EXPECT_TRUE(m.params.enc_fwd.b.topRows(5).isZero());
}
