#pragma once

// Recurrent network core: LSTM cells, bidirectional encoders, the two model
// shapes used by the joiner and splitter (seq2seq and per-char tagger),
// losses with analytic gradients, RMSProp and the training loops.
//
// Parameters are templated on the scalar so the same forward/backward code
// runs in float for training and in double for gradient checking.
//
// Gate blocks are stacked i, f, c(candidate), o along the rows of W, U and b.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "sandhi/corpus.hpp"

namespace sandhi::nn {

template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

struct TrainConfig {
  int hidden_size = 16;
  int batch_size = 64;
  int epochs = 100;
  double learning_rate = 1e-3;
  double rho = 0.9;
  double epsilon = 1e-7;
  std::uint64_t seed = 1;
  int max_decode_margin = 4;
  double clip_norm = 5.0;

  /// Throws Error{InvalidConfig} unless every field is positive.
  void validate() const;
};

template <typename T>
struct LstmParams {
  Matrix<T> W;  // 4H x input
  Matrix<T> U;  // 4H x H
  Matrix<T> b;  // 4H x 1

  Eigen::Index hidden() const { return U.cols(); }
  Eigen::Index input_dim() const { return W.cols(); }
};

template <typename T>
struct DenseParams {
  Matrix<T> W;
  Matrix<T> b;  // rows x 1
};

template <typename T>
struct LstmState {
  Vector<T> h;
  Vector<T> c;
};

/// Encoder is a forward/backward LSTM pair; the bridge maps
/// [h_fwd; h_bwd; c_fwd; c_bwd] to the decoder's [h0; c0].
template <typename T>
struct Seq2SeqParams {
  LstmParams<T> enc_fwd;
  LstmParams<T> enc_bwd;
  DenseParams<T> bridge;
  LstmParams<T> dec;
  DenseParams<T> out;
};

template <typename T>
struct TaggerParams {
  LstmParams<T> enc_fwd;
  LstmParams<T> enc_bwd;
  DenseParams<T> head;  // 1 x 2H, sigmoid
};

// Visit every parameter matrix in serialization order.
template <typename T, typename F>
void for_each_matrix(LstmParams<T>& p, F&& f) {
  f(p.W);
  f(p.U);
  f(p.b);
}
template <typename T, typename F>
void for_each_matrix(DenseParams<T>& p, F&& f) {
  f(p.W);
  f(p.b);
}
template <typename T, typename F>
void for_each_matrix(Seq2SeqParams<T>& p, F&& f) {
  for_each_matrix(p.enc_fwd, f);
  for_each_matrix(p.enc_bwd, f);
  for_each_matrix(p.bridge, f);
  for_each_matrix(p.dec, f);
  for_each_matrix(p.out, f);
}
template <typename T, typename F>
void for_each_matrix(TaggerParams<T>& p, F&& f) {
  for_each_matrix(p.enc_fwd, f);
  for_each_matrix(p.enc_bwd, f);
  for_each_matrix(p.head, f);
}
template <typename P, typename F>
void for_each_matrix(const P& p, F&& f) {
  for_each_matrix(const_cast<P&>(p), [&](auto& m) { f(std::as_const(m)); });
}

/// Two parameter sets of the same shape visited in lockstep.
template <typename P, typename F>
void zip_matrices(P& a, P& b, F&& f) {
  std::vector<decltype(&a.enc_fwd.W)> pa;
  std::vector<decltype(&b.enc_fwd.W)> pb;
  for_each_matrix(a, [&](auto& m) { pa.push_back(&m); });
  for_each_matrix(b, [&](auto& m) { pb.push_back(&m); });
  for (std::size_t i = 0; i < pa.size(); ++i) f(*pa[i], *pb[i]);
}

template <typename To, typename P>
auto cast_params(const P& p);

template <typename T>
Seq2SeqParams<T> zeros_like(const Seq2SeqParams<T>& p);
template <typename T>
TaggerParams<T> zeros_like(const TaggerParams<T>& p);

// ---------------------------------------------------------------------------
// Single-step / single-sequence primitives

/// Throws Error{DimensionMismatch}.
template <typename T>
LstmState<T> lstm_step(const LstmParams<T>& p, const Vector<T>& x, const LstmState<T>& state);

template <typename T>
struct BiLstmOutput {
  std::vector<Vector<T>> outputs;  // [h_fwd_t; h_bwd_t]
  LstmState<T> fwd_final;
  LstmState<T> bwd_final;
};

/// Throws Error{EmptySequence} or Error{DimensionMismatch}.
template <typename T>
BiLstmOutput<T> bilstm_encode(const LstmParams<T>& fwd, const LstmParams<T>& bwd,
                              const std::vector<Vector<T>>& xs);

// ---------------------------------------------------------------------------
// Batches. Token ids are laid out time-major ([t * batch + b]); -1 marks PAD,
// whose one-hot input is the zero vector and which is masked from losses.

struct SeqBatch {
  int batch = 0;
  int enc_len = 0;
  int dec_len = 0;
  std::vector<int> enc_ids;
  std::vector<int> dec_in;
  std::vector<int> dec_out;
};

struct TagBatch {
  int batch = 0;
  int len = 0;
  std::vector<int> ids;
  std::vector<float> targets;  // ignored where ids == -1
};

struct EncodedSeq {
  std::vector<int> input;
  std::vector<int> target;  // includes '&' ... '$'
};

struct EncodedTag {
  std::vector<int> input;
  std::vector<float> labels;
};

SeqBatch make_seq_batch(std::span<const EncodedSeq* const> items);
TagBatch make_tag_batch(std::span<const EncodedTag* const> items);

/// Mean cross-entropy over unmasked decoder steps. When `grad` is non-null it
/// must be shaped like `p` and receives (accumulates) dLoss/dParams.
template <typename T>
T seq2seq_loss(const Seq2SeqParams<T>& p, const SeqBatch& batch, Seq2SeqParams<T>* grad);

/// Mean squared error of per-char sigmoid outputs over unmasked positions.
template <typename T>
T tagger_loss(const TaggerParams<T>& p, const TagBatch& batch, TaggerParams<T>* grad);

// ---------------------------------------------------------------------------
// Optimizer

/// cache' = rho cache + (1 - rho) grad^2; param' = param - lr grad / (sqrt(cache') + eps).
template <typename T>
void rmsprop_update(Matrix<T>& param, const Matrix<T>& grad, Matrix<T>& cache, T lr, T rho, T epsilon);

/// Scales `grad` so its global L2 norm is at most `max_norm`. Returns the
/// norm before clipping.
template <typename P>
double clip_global_norm(P& grad, double max_norm);

// ---------------------------------------------------------------------------
// Models

struct Seq2SeqModel {
  Vocabulary vocab;
  TrainConfig config;
  Seq2SeqParams<float> params;
};

struct TaggerModel {
  Vocabulary vocab;
  TrainConfig config;
  TaggerParams<float> params;
};

/// Uniform(-0.08, 0.08) weights, zero biases, forget-gate bias 1.
Seq2SeqModel make_seq2seq(Vocabulary vocab, const TrainConfig& cfg);
TaggerModel make_tagger(Vocabulary vocab, const TrainConfig& cfg);

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;  // NaN without a validation set
};
using History = std::vector<EpochStats>;
using EpochCallback = std::function<void(const EpochStats&)>;

/// Teacher-forced training. Targets must start with '&' and end with '$'
/// (Error{InvalidConfig}); chars outside the vocabulary raise Error{VocabMiss}.
History train_seq2seq(Seq2SeqModel& model, std::span<const TrainingExample> train,
                      std::span<const TrainingExample> validation, const TrainConfig& cfg,
                      const EpochCallback& on_epoch = {});

/// Error{LengthMismatch} when a label vector differs in length from its input.
History train_tagger(TaggerModel& model, std::span<const TrainingExample> train,
                     std::span<const TrainingExample> validation, const TrainConfig& cfg,
                     const EpochCallback& on_epoch = {});

/// Mean loss over a dataset without updating (token-weighted).
double evaluate_seq2seq_loss(const Seq2SeqModel& model, std::span<const TrainingExample> data);
double evaluate_tagger_loss(const TaggerModel& model, std::span<const TrainingExample> data);

struct DecodeTrace {
  std::string text;                       // '&', '$' and PAD stripped
  std::vector<std::vector<double>> probs;  // softmax per emitted step
  bool reached_end = false;               // stopped on '$' rather than the cap
};

/// Greedy decode from '&': argmax per step (ties to the lowest index), stop at
/// '$' or after |input| + max_decode_margin steps.
DecodeTrace greedy_decode_trace(const Seq2SeqModel& model, std::string_view input);
std::string greedy_decode(const Seq2SeqModel& model, std::string_view input);

/// Per-char sigmoid outputs of the tagger.
std::vector<float> tag_scores(const TaggerModel& model, std::string_view input);

// ---------------------------------------------------------------------------
// Gradient checking

enum class ModelKind { Seq2Seq, Tagger };

struct GradCheckSize {
  int vocab = 9;    // including '+', '&', '$' and PAD
  int hidden = 4;
  int max_len = 5;  // longest input/target sequence
  int batch = 3;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  double max_abs_analytic = 0.0;
  double max_abs_numeric = 0.0;
  std::size_t parameters = 0;
};

/// Central differences (step 1e-5) on every parameter of a random double
/// model and random padded batch, against the analytic gradient.
GradCheckResult gradient_check(ModelKind kind, GradCheckSize size = {}, std::uint64_t seed = 1);

GradCheckResult check_gradients(const Seq2SeqParams<double>& p, const SeqBatch& batch);
GradCheckResult check_gradients(const TaggerParams<double>& p, const TagBatch& batch);

/// Relative error used by the checks: |a - n| / max(|a| + |n|, 1e-6).
double relative_error(double analytic, double numeric);

// ---------------------------------------------------------------------------

template <typename To, typename P>
auto cast_params(const P& p) {
  using Out = std::conditional_t<std::is_same_v<P, Seq2SeqParams<float>> ||
                                     std::is_same_v<P, Seq2SeqParams<double>>,
                                 Seq2SeqParams<To>, TaggerParams<To>>;
  Out out;
  std::vector<Matrix<To>*> dst;
  for_each_matrix(out, [&](Matrix<To>& m) { dst.push_back(&m); });
  std::size_t i = 0;
  for_each_matrix(p, [&](const auto& m) { *dst[i++] = m.template cast<To>(); });
  return out;
}

template <typename T>
Seq2SeqParams<T> zeros_like(const Seq2SeqParams<T>& p) {
  Seq2SeqParams<T> z = p;
  for_each_matrix(z, [](Matrix<T>& m) { m.setZero(); });
  return z;
}

template <typename T>
TaggerParams<T> zeros_like(const TaggerParams<T>& p) {
  TaggerParams<T> z = p;
  for_each_matrix(z, [](Matrix<T>& m) { m.setZero(); });
  return z;
}

template <typename P>
double clip_global_norm(P& grad, double max_norm) {
  double sq = 0.0;
  for_each_matrix(grad, [&](const auto& m) { sq += static_cast<double>(m.squaredNorm()); });
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for_each_matrix(grad, [&](auto& m) {
      using S = typename std::decay_t<decltype(m)>::Scalar;
      m *= static_cast<S>(scale);
    });
  }
  return norm;
}

}  // namespace sandhi::nn
