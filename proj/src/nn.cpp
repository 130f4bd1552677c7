#include "sandhi/nn.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <type_traits>

#include "sandhi/error.hpp"
#include "sandhi/random.hpp"

namespace sandhi::nn {
namespace {

constexpr double kInitRange = 0.08;
constexpr double kForgetBias = 1.0;

template <typename T>
using RowMask = Eigen::Array<T, 1, Eigen::Dynamic>;

template <typename T>
Matrix<T> sigmoid(const Matrix<T>& x) {
  return (T(1) / (T(1) + (-x.array()).exp())).matrix();
}

// Activations recorded by a batched forward pass over one direction.
// Vectors are indexed by processing step s; time(s) maps to sequence time.
template <typename T>
struct LstmTape {
  int len = 0;
  int batch = 0;
  bool reverse = false;
  Matrix<T> h0;
  Matrix<T> c0;
  std::vector<Matrix<T>> gates;   // post-activation i, f, g, o
  std::vector<Matrix<T>> tanh_c;  // tanh of the new cell before masking
  std::vector<Matrix<T>> h;       // state after the step (held on PAD)
  std::vector<Matrix<T>> c;
  std::vector<RowMask<T>> mask;

  int time(int s) const { return reverse ? len - 1 - s : s; }
  int step(int t) const { return reverse ? len - 1 - t : t; }
  const Matrix<T>& h_prev(int s) const { return s == 0 ? h0 : h[static_cast<std::size_t>(s - 1)]; }
  const Matrix<T>& c_prev(int s) const { return s == 0 ? c0 : c[static_cast<std::size_t>(s - 1)]; }
  const Matrix<T>& h_final() const { return len == 0 ? h0 : h.back(); }
  const Matrix<T>& c_final() const { return len == 0 ? c0 : c.back(); }
};

template <typename T>
LstmTape<T> lstm_forward(const LstmParams<T>& p, const std::vector<int>& ids, int len, int batch,
                         bool reverse, Matrix<T> h0, Matrix<T> c0) {
  const Eigen::Index H = p.hidden();
  LstmTape<T> tape;
  tape.len = len;
  tape.batch = batch;
  tape.reverse = reverse;
  tape.h0 = std::move(h0);
  tape.c0 = std::move(c0);
  tape.gates.reserve(static_cast<std::size_t>(len));
  for (int s = 0; s < len; ++s) {
    const int t = tape.time(s);
    const Matrix<T>& hp = tape.h_prev(s);
    const Matrix<T>& cp = tape.c_prev(s);
    Matrix<T> pre = p.U * hp;
    pre.colwise() += p.b.col(0);
    RowMask<T> m(batch);
    for (int b = 0; b < batch; ++b) {
      const int id = ids[static_cast<std::size_t>(t * batch + b)];
      if (id >= 0) {
        pre.col(b) += p.W.col(id);
        m(b) = T(1);
      } else {
        m(b) = T(0);
      }
    }
    Matrix<T> g(4 * H, batch);
    g.topRows(H) = sigmoid<T>(pre.topRows(H));
    g.middleRows(H, H) = sigmoid<T>(pre.middleRows(H, H));
    g.middleRows(2 * H, H) = pre.middleRows(2 * H, H).array().tanh().matrix();
    g.bottomRows(H) = sigmoid<T>(pre.bottomRows(H));
    Matrix<T> cn = g.middleRows(H, H).cwiseProduct(cp) +
                   g.topRows(H).cwiseProduct(g.middleRows(2 * H, H));
    Matrix<T> tc = cn.array().tanh().matrix();
    Matrix<T> hn = g.bottomRows(H).cwiseProduct(tc);
    for (int b = 0; b < batch; ++b) {
      if (m(b) == T(0)) {
        cn.col(b) = cp.col(b);
        hn.col(b) = hp.col(b);
      }
    }
    tape.gates.push_back(std::move(g));
    tape.tanh_c.push_back(std::move(tc));
    tape.h.push_back(std::move(hn));
    tape.c.push_back(std::move(cn));
    tape.mask.push_back(std::move(m));
  }
  return tape;
}

// Backpropagates through one direction. `dh_out` (indexed by time, may be
// null) holds upstream gradients on each step's h; dh/dc seed the final state.
template <typename T>
void lstm_backward(const LstmParams<T>& p, const LstmTape<T>& tape, const std::vector<int>& ids,
                   const std::type_identity_t<std::vector<Matrix<T>>>* dh_out, Matrix<T> dh, Matrix<T> dc,
                   LstmParams<T>& grad, std::type_identity_t<Matrix<T>>* dh0,
                   std::type_identity_t<Matrix<T>>* dc0) {
  const Eigen::Index H = p.hidden();
  const int batch = tape.batch;
  for (int s = tape.len - 1; s >= 0; --s) {
    const int t = tape.time(s);
    const auto su = static_cast<std::size_t>(s);
    if (dh_out != nullptr) dh += (*dh_out)[static_cast<std::size_t>(t)];
    const Matrix<T>& g = tape.gates[su];
    const Matrix<T>& tc = tape.tanh_c[su];
    const RowMask<T>& m = tape.mask[su];
    const Matrix<T>& hp = tape.h_prev(s);
    const Matrix<T>& cp = tape.c_prev(s);
    const auto i = g.topRows(H).array();
    const auto f = g.middleRows(H, H).array();
    const auto cand = g.middleRows(2 * H, H).array();
    const auto o = g.bottomRows(H).array();

    const Eigen::Array<T, Eigen::Dynamic, Eigen::Dynamic> dcn =
        dc.array() + dh.array() * o * (T(1) - tc.array().square());
    Matrix<T> dpre(4 * H, batch);
    dpre.topRows(H) = (dcn * cand * i * (T(1) - i)).matrix();
    dpre.middleRows(H, H) = (dcn * cp.array() * f * (T(1) - f)).matrix();
    dpre.middleRows(2 * H, H) = (dcn * i * (T(1) - cand.square())).matrix();
    dpre.bottomRows(H) = (dh.array() * tc.array() * o * (T(1) - o)).matrix();
    dpre.array().rowwise() *= m;

    grad.U.noalias() += dpre * hp.transpose();
    grad.b.col(0) += dpre.rowwise().sum();
    for (int b = 0; b < batch; ++b) {
      const int id = ids[static_cast<std::size_t>(t * batch + b)];
      if (id >= 0) grad.W.col(id) += dpre.col(b);
    }

    Matrix<T> dh_prev = p.U.transpose() * dpre;
    Matrix<T> dc_prev = (dcn * f).matrix();
    for (int b = 0; b < batch; ++b) {
      if (m(b) == T(0)) {
        dh_prev.col(b) = dh.col(b);
        dc_prev.col(b) = dc.col(b);
      }
    }
    dh = std::move(dh_prev);
    dc = std::move(dc_prev);
  }
  if (dh0 != nullptr) *dh0 = std::move(dh);
  if (dc0 != nullptr) *dc0 = std::move(dc);
}

// Column-wise log-softmax.
template <typename T>
Matrix<T> log_softmax(const Matrix<T>& logits) {
  Matrix<T> out(logits.rows(), logits.cols());
  for (Eigen::Index b = 0; b < logits.cols(); ++b) {
    const T mx = logits.col(b).maxCoeff();
    const T lse = mx + std::log((logits.col(b).array() - mx).exp().sum());
    out.col(b) = logits.col(b).array() - lse;
  }
  return out;
}

template <typename T>
void init_lstm(LstmParams<T>& p, Eigen::Index input, Eigen::Index hidden, Rng& rng) {
  p.W.resize(4 * hidden, input);
  p.U.resize(4 * hidden, hidden);
  p.b = Matrix<T>::Zero(4 * hidden, 1);
  for (Eigen::Index j = 0; j < p.W.size(); ++j) p.W.data()[j] = static_cast<T>(rng.uniform(-kInitRange, kInitRange));
  for (Eigen::Index j = 0; j < p.U.size(); ++j) p.U.data()[j] = static_cast<T>(rng.uniform(-kInitRange, kInitRange));
  p.b.middleRows(hidden, hidden).setConstant(static_cast<T>(kForgetBias));
}

template <typename T>
void init_dense(DenseParams<T>& p, Eigen::Index out, Eigen::Index in, Rng& rng) {
  p.W.resize(out, in);
  for (Eigen::Index j = 0; j < p.W.size(); ++j) p.W.data()[j] = static_cast<T>(rng.uniform(-kInitRange, kInitRange));
  p.b = Matrix<T>::Zero(out, 1);
}

void check_framed(const TrainingExample& ex) {
  const auto& t = ex.target;
  if (t.size() < 2 || t.front() != Vocabulary::kStart || t.back() != Vocabulary::kEnd) {
    throw Error(ErrorCode::InvalidConfig, "target '" + t + "' is not framed by '&' and '$'");
  }
}

std::vector<EncodedSeq> encode_seq(const Vocabulary& vocab, std::span<const TrainingExample> data) {
  std::vector<EncodedSeq> out;
  out.reserve(data.size());
  for (const auto& ex : data) {
    check_framed(ex);
    if (ex.input.empty()) throw Error(ErrorCode::EmptySequence, "empty input sequence");
    out.push_back({vocab.encode(ex.input), vocab.encode(ex.target)});
  }
  return out;
}

std::vector<EncodedTag> encode_tag(const Vocabulary& vocab, std::span<const TrainingExample> data) {
  std::vector<EncodedTag> out;
  out.reserve(data.size());
  for (const auto& ex : data) {
    if (ex.labels.size() != ex.input.size()) {
      throw Error(ErrorCode::LengthMismatch, "tagger labels differ in length from input '" + ex.input + "'");
    }
    if (ex.input.empty()) throw Error(ErrorCode::EmptySequence, "empty input sequence");
    out.push_back({vocab.encode(ex.input), ex.labels});
  }
  return out;
}

// Shuffle, bucket by length, chunk, shuffle the chunks.
template <typename Key>
std::vector<std::vector<std::size_t>> make_batches(std::size_t n, int batch_size, Rng& rng, Key key) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
  std::vector<std::vector<std::size_t>> batches;
  const auto bs = static_cast<std::size_t>(batch_size);
  for (std::size_t i = 0; i < n; i += bs) {
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                         order.begin() + static_cast<std::ptrdiff_t>(std::min(n, i + bs)));
  }
  rng.shuffle(batches);
  return batches;
}

// Fixed-order batches for evaluation.
std::vector<std::vector<std::size_t>> eval_batches(std::size_t n, int batch_size) {
  std::vector<std::vector<std::size_t>> batches;
  const auto bs = static_cast<std::size_t>(batch_size);
  for (std::size_t i = 0; i < n; i += bs) {
    std::vector<std::size_t> idx(std::min(n, i + bs) - i);
    std::iota(idx.begin(), idx.end(), i);
    batches.push_back(std::move(idx));
  }
  return batches;
}

std::size_t seq_tokens(const SeqBatch& b) {
  return static_cast<std::size_t>(std::count_if(b.dec_out.begin(), b.dec_out.end(), [](int y) { return y >= 0; }));
}

std::size_t tag_tokens(const TagBatch& b) {
  return static_cast<std::size_t>(std::count_if(b.ids.begin(), b.ids.end(), [](int y) { return y >= 0; }));
}

template <typename P>
struct RmsProp {
  P cache;
  explicit RmsProp(const P& like) : cache(zeros_like(like)) {}

  void step(P& params, P& grad, const TrainConfig& cfg) {
    std::vector<Matrix<float>*> ps, gs, cs;
    for_each_matrix(params, [&](Matrix<float>& m) { ps.push_back(&m); });
    for_each_matrix(grad, [&](Matrix<float>& m) { gs.push_back(&m); });
    for_each_matrix(cache, [&](Matrix<float>& m) { cs.push_back(&m); });
    for (std::size_t i = 0; i < ps.size(); ++i) {
      rmsprop_update<float>(*ps[i], *gs[i], *cs[i], static_cast<float>(cfg.learning_rate),
                            static_cast<float>(cfg.rho), static_cast<float>(cfg.epsilon));
    }
  }
};

void check_finite(double loss, int epoch) {
  if (!std::isfinite(loss)) {
    throw Error(ErrorCode::InvalidConfig, "training loss diverged at epoch " + std::to_string(epoch));
  }
}

template <typename P, typename B, typename Enc, typename MakeBatch, typename LossFn, typename TokenFn, typename KeyFn>
History run_training(P& params, const std::vector<Enc>& train, const std::vector<Enc>& val,
                     const TrainConfig& cfg, const EpochCallback& on_epoch, MakeBatch make_batch,
                     LossFn loss_fn, TokenFn tokens, KeyFn key) {
  Rng rng(cfg.seed ^ 0x9E3779B97F4A7C15ULL);
  RmsProp<P> opt(params);
  History history;
  history.reserve(static_cast<std::size_t>(cfg.epochs));
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto batches = make_batches(train.size(), cfg.batch_size, rng, key);
    double loss_sum = 0.0;
    for (const auto& idx : batches) {
      std::vector<const Enc*> items;
      items.reserve(idx.size());
      for (auto i : idx) items.push_back(&train[i]);
      const B batch = make_batch(std::span<const Enc* const>(items));
      P grad = zeros_like(params);
      const float loss = loss_fn(params, batch, &grad);
      loss_sum += static_cast<double>(loss);
      clip_global_norm(grad, cfg.clip_norm);
      opt.step(params, grad, cfg);
    }
    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = batches.empty() ? 0.0 : loss_sum / static_cast<double>(batches.size());
    check_finite(stats.train_loss, epoch);
    if (val.empty()) {
      stats.val_loss = std::numeric_limits<double>::quiet_NaN();
    } else {
      double sum = 0.0;
      std::size_t count = 0;
      for (const auto& idx : eval_batches(val.size(), cfg.batch_size)) {
        std::vector<const Enc*> items;
        for (auto i : idx) items.push_back(&val[i]);
        const B batch = make_batch(std::span<const Enc* const>(items));
        const std::size_t n = tokens(batch);
        sum += static_cast<double>(loss_fn(params, batch, nullptr)) * static_cast<double>(n);
        count += n;
      }
      stats.val_loss = count == 0 ? 0.0 : sum / static_cast<double>(count);
    }
    history.push_back(stats);
    if (on_epoch) on_epoch(stats);
  }
  return history;
}

}  // namespace

void TrainConfig::validate() const {
  if (hidden_size <= 0 || batch_size <= 0 || epochs <= 0 || learning_rate <= 0.0 || rho <= 0.0 ||
      rho >= 1.0 || epsilon <= 0.0 || max_decode_margin <= 0 || clip_norm <= 0.0) {
    throw Error(ErrorCode::InvalidConfig, "training configuration fields must be positive (rho < 1)");
  }
}

template <typename T>
LstmState<T> lstm_step(const LstmParams<T>& p, const Vector<T>& x, const LstmState<T>& state) {
  const Eigen::Index H = p.hidden();
  if (x.size() != p.input_dim() || state.h.size() != H || state.c.size() != H ||
      p.W.rows() != 4 * H || p.b.rows() != 4 * H) {
    throw Error(ErrorCode::DimensionMismatch, "lstm_step operand shapes disagree");
  }
  const Vector<T> pre = p.W * x + p.U * state.h + p.b.col(0);
  const auto sig = [](const auto& v) { return (T(1) / (T(1) + (-v.array()).exp())).matrix(); };
  const Vector<T> i = sig(pre.head(H));
  const Vector<T> f = sig(pre.segment(H, H));
  const Vector<T> g = pre.segment(2 * H, H).array().tanh().matrix();
  const Vector<T> o = sig(pre.tail(H));
  LstmState<T> out;
  out.c = f.cwiseProduct(state.c) + i.cwiseProduct(g);
  out.h = o.cwiseProduct(out.c.array().tanh().matrix());
  return out;
}

template <typename T>
BiLstmOutput<T> bilstm_encode(const LstmParams<T>& fwd, const LstmParams<T>& bwd,
                              const std::vector<Vector<T>>& xs) {
  if (xs.empty()) throw Error(ErrorCode::EmptySequence, "bilstm_encode needs a nonempty sequence");
  const auto n = xs.size();
  LstmState<T> sf{Vector<T>::Zero(fwd.hidden()), Vector<T>::Zero(fwd.hidden())};
  LstmState<T> sb{Vector<T>::Zero(bwd.hidden()), Vector<T>::Zero(bwd.hidden())};
  std::vector<Vector<T>> hf(n), hb(n);
  for (std::size_t t = 0; t < n; ++t) {
    sf = lstm_step(fwd, xs[t], sf);
    hf[t] = sf.h;
  }
  for (std::size_t k = n; k-- > 0;) {
    sb = lstm_step(bwd, xs[k], sb);
    hb[k] = sb.h;
  }
  BiLstmOutput<T> out;
  out.outputs.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    out.outputs[t].resize(hf[t].size() + hb[t].size());
    out.outputs[t] << hf[t], hb[t];
  }
  out.fwd_final = sf;
  out.bwd_final = sb;
  return out;
}

SeqBatch make_seq_batch(std::span<const EncodedSeq* const> items) {
  SeqBatch b;
  b.batch = static_cast<int>(items.size());
  for (const auto* it : items) {
    b.enc_len = std::max(b.enc_len, static_cast<int>(it->input.size()));
    b.dec_len = std::max(b.dec_len, static_cast<int>(it->target.size()) - 1);
  }
  const auto B = static_cast<std::size_t>(b.batch);
  b.enc_ids.assign(static_cast<std::size_t>(b.enc_len) * B, -1);
  b.dec_in.assign(static_cast<std::size_t>(b.dec_len) * B, -1);
  b.dec_out.assign(static_cast<std::size_t>(b.dec_len) * B, -1);
  for (std::size_t k = 0; k < B; ++k) {
    const auto& in = items[k]->input;
    const auto& tg = items[k]->target;
    for (std::size_t t = 0; t < in.size(); ++t) b.enc_ids[t * B + k] = in[t];
    for (std::size_t t = 0; t + 1 < tg.size(); ++t) {
      b.dec_in[t * B + k] = tg[t];
      b.dec_out[t * B + k] = tg[t + 1];
    }
  }
  return b;
}

TagBatch make_tag_batch(std::span<const EncodedTag* const> items) {
  TagBatch b;
  b.batch = static_cast<int>(items.size());
  for (const auto* it : items) b.len = std::max(b.len, static_cast<int>(it->input.size()));
  const auto B = static_cast<std::size_t>(b.batch);
  b.ids.assign(static_cast<std::size_t>(b.len) * B, -1);
  b.targets.assign(static_cast<std::size_t>(b.len) * B, 0.0f);
  for (std::size_t k = 0; k < B; ++k) {
    const auto& in = items[k]->input;
    for (std::size_t t = 0; t < in.size(); ++t) {
      b.ids[t * B + k] = in[t];
      b.targets[t * B + k] = items[k]->labels[t];
    }
  }
  return b;
}

template <typename T>
T seq2seq_loss(const Seq2SeqParams<T>& p, const SeqBatch& bt, Seq2SeqParams<T>* grad) {
  const int B = bt.batch;
  const Eigen::Index H = p.enc_fwd.hidden();
  const Eigen::Index Hd = p.dec.hidden();
  const Matrix<T> zero = Matrix<T>::Zero(H, B);
  const auto fw = lstm_forward(p.enc_fwd, bt.enc_ids, bt.enc_len, B, false, zero, zero);
  const auto bw = lstm_forward(p.enc_bwd, bt.enc_ids, bt.enc_len, B, true, zero, zero);
  Matrix<T> s(4 * H, B);
  s << fw.h_final(), bw.h_final(), fw.c_final(), bw.c_final();
  Matrix<T> z = p.bridge.W * s;
  z.colwise() += p.bridge.b.col(0);
  const auto dec = lstm_forward(p.dec, bt.dec_in, bt.dec_len, B, false, Matrix<T>(z.topRows(Hd)),
                                Matrix<T>(z.bottomRows(Hd)));

  T loss = 0;
  std::size_t count = 0;
  std::vector<Matrix<T>> log_probs(static_cast<std::size_t>(bt.dec_len));
  for (int t = 0; t < bt.dec_len; ++t) {
    Matrix<T> logits = p.out.W * dec.h[static_cast<std::size_t>(t)];
    logits.colwise() += p.out.b.col(0);
    auto& lp = log_probs[static_cast<std::size_t>(t)];
    lp = log_softmax(logits);
    for (int b = 0; b < B; ++b) {
      const int y = bt.dec_out[static_cast<std::size_t>(t * B + b)];
      if (y >= 0) {
        loss -= lp(y, b);
        ++count;
      }
    }
  }
  if (count == 0) return T(0);
  const T inv = T(1) / static_cast<T>(count);
  loss *= inv;
  if (grad == nullptr) return loss;

  std::vector<Matrix<T>> dh_out(static_cast<std::size_t>(bt.dec_len));
  for (int t = 0; t < bt.dec_len; ++t) {
    const auto tu = static_cast<std::size_t>(t);
    Matrix<T> dl = log_probs[tu].array().exp().matrix();
    for (int b = 0; b < B; ++b) {
      const int y = bt.dec_out[static_cast<std::size_t>(t * B + b)];
      if (y >= 0) {
        dl(y, b) -= T(1);
      } else {
        dl.col(b).setZero();
      }
    }
    dl *= inv;
    grad->out.W.noalias() += dl * dec.h[tu].transpose();
    grad->out.b.col(0) += dl.rowwise().sum();
    dh_out[tu] = p.out.W.transpose() * dl;
  }
  Matrix<T> dh0, dc0;
  lstm_backward(p.dec, dec, bt.dec_in, &dh_out, Matrix<T>(Matrix<T>::Zero(Hd, B)),
                Matrix<T>(Matrix<T>::Zero(Hd, B)), grad->dec, &dh0, &dc0);
  Matrix<T> dz(2 * Hd, B);
  dz << dh0, dc0;
  grad->bridge.W.noalias() += dz * s.transpose();
  grad->bridge.b.col(0) += dz.rowwise().sum();
  const Matrix<T> ds = p.bridge.W.transpose() * dz;
  lstm_backward(p.enc_fwd, fw, bt.enc_ids, nullptr, Matrix<T>(ds.topRows(H)),
                Matrix<T>(ds.middleRows(2 * H, H)), grad->enc_fwd, nullptr, nullptr);
  lstm_backward(p.enc_bwd, bw, bt.enc_ids, nullptr, Matrix<T>(ds.middleRows(H, H)),
                Matrix<T>(ds.bottomRows(H)), grad->enc_bwd, nullptr, nullptr);
  return loss;
}

template <typename T>
T tagger_loss(const TaggerParams<T>& p, const TagBatch& bt, TaggerParams<T>* grad) {
  const int B = bt.batch;
  const Eigen::Index H = p.enc_fwd.hidden();
  const Matrix<T> zero = Matrix<T>::Zero(H, B);
  const auto fw = lstm_forward(p.enc_fwd, bt.ids, bt.len, B, false, zero, zero);
  const auto bw = lstm_forward(p.enc_bwd, bt.ids, bt.len, B, true, zero, zero);

  T loss = 0;
  std::size_t count = 0;
  std::vector<Matrix<T>> outs(static_cast<std::size_t>(bt.len));
  std::vector<Matrix<T>> ys(static_cast<std::size_t>(bt.len));
  for (int t = 0; t < bt.len; ++t) {
    const auto tu = static_cast<std::size_t>(t);
    outs[tu].resize(2 * H, B);
    outs[tu] << fw.h[static_cast<std::size_t>(fw.step(t))], bw.h[static_cast<std::size_t>(bw.step(t))];
    Matrix<T> pre = p.head.W * outs[tu];
    pre.colwise() += p.head.b.col(0);
    ys[tu] = sigmoid<T>(pre);
    for (int b = 0; b < B; ++b) {
      const auto k = static_cast<std::size_t>(t * B + b);
      if (bt.ids[k] >= 0) {
        const T d = ys[tu](0, b) - static_cast<T>(bt.targets[k]);
        loss += d * d;
        ++count;
      }
    }
  }
  if (count == 0) return T(0);
  const T inv = T(1) / static_cast<T>(count);
  loss *= inv;
  if (grad == nullptr) return loss;

  std::vector<Matrix<T>> dh_f(static_cast<std::size_t>(bt.len));
  std::vector<Matrix<T>> dh_b(static_cast<std::size_t>(bt.len));
  for (int t = 0; t < bt.len; ++t) {
    const auto tu = static_cast<std::size_t>(t);
    Matrix<T> dpre = Matrix<T>::Zero(1, B);
    for (int b = 0; b < B; ++b) {
      const auto k = static_cast<std::size_t>(t * B + b);
      if (bt.ids[k] >= 0) {
        const T y = ys[tu](0, b);
        dpre(0, b) = T(2) * (y - static_cast<T>(bt.targets[k])) * inv * y * (T(1) - y);
      }
    }
    grad->head.W.noalias() += dpre * outs[tu].transpose();
    grad->head.b(0, 0) += dpre.sum();
    const Matrix<T> dout = p.head.W.transpose() * dpre;
    dh_f[tu] = dout.topRows(H);
    dh_b[tu] = dout.bottomRows(H);
  }
  lstm_backward(p.enc_fwd, fw, bt.ids, &dh_f, Matrix<T>(zero), Matrix<T>(zero), grad->enc_fwd, nullptr, nullptr);
  lstm_backward(p.enc_bwd, bw, bt.ids, &dh_b, Matrix<T>(zero), Matrix<T>(zero), grad->enc_bwd, nullptr, nullptr);
  return loss;
}

template <typename T>
void rmsprop_update(Matrix<T>& param, const Matrix<T>& grad, Matrix<T>& cache, T lr, T rho, T epsilon) {
  cache.array() = rho * cache.array() + (T(1) - rho) * grad.array().square();
  param.array() -= lr * grad.array() / (cache.array().sqrt() + epsilon);
}

Seq2SeqModel make_seq2seq(Vocabulary vocab, const TrainConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const auto V = static_cast<Eigen::Index>(vocab.size());
  const Eigen::Index H = cfg.hidden_size;
  Seq2SeqModel m;
  m.vocab = std::move(vocab);
  m.config = cfg;
  init_lstm(m.params.enc_fwd, V, H, rng);
  init_lstm(m.params.enc_bwd, V, H, rng);
  init_dense(m.params.bridge, 2 * H, 4 * H, rng);
  init_lstm(m.params.dec, V, H, rng);
  init_dense(m.params.out, V, H, rng);
  return m;
}

TaggerModel make_tagger(Vocabulary vocab, const TrainConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const auto V = static_cast<Eigen::Index>(vocab.size());
  const Eigen::Index H = cfg.hidden_size;
  TaggerModel m;
  m.vocab = std::move(vocab);
  m.config = cfg;
  init_lstm(m.params.enc_fwd, V, H, rng);
  init_lstm(m.params.enc_bwd, V, H, rng);
  init_dense(m.params.head, 1, 2 * H, rng);
  return m;
}

History train_seq2seq(Seq2SeqModel& model, std::span<const TrainingExample> train,
                      std::span<const TrainingExample> validation, const TrainConfig& cfg,
                      const EpochCallback& on_epoch) {
  cfg.validate();
  const auto tr = encode_seq(model.vocab, train);
  const auto va = encode_seq(model.vocab, validation);
  auto key = [&](std::size_t i) { return std::pair(tr[i].input.size(), tr[i].target.size()); };
  auto history = run_training<Seq2SeqParams<float>, SeqBatch>(
      model.params, tr, va, cfg, on_epoch, make_seq_batch,
      [](const Seq2SeqParams<float>& p, const SeqBatch& b, Seq2SeqParams<float>* g) {
        return seq2seq_loss<float>(p, b, g);
      },
      seq_tokens, key);
  model.config = cfg;
  return history;
}

History train_tagger(TaggerModel& model, std::span<const TrainingExample> train,
                     std::span<const TrainingExample> validation, const TrainConfig& cfg,
                     const EpochCallback& on_epoch) {
  cfg.validate();
  const auto tr = encode_tag(model.vocab, train);
  const auto va = encode_tag(model.vocab, validation);
  auto key = [&](std::size_t i) { return tr[i].input.size(); };
  auto history = run_training<TaggerParams<float>, TagBatch>(
      model.params, tr, va, cfg, on_epoch, make_tag_batch,
      [](const TaggerParams<float>& p, const TagBatch& b, TaggerParams<float>* g) {
        return tagger_loss<float>(p, b, g);
      },
      tag_tokens, key);
  model.config = cfg;
  return history;
}

double evaluate_seq2seq_loss(const Seq2SeqModel& model, std::span<const TrainingExample> data) {
  const auto enc = encode_seq(model.vocab, data);
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& idx : eval_batches(enc.size(), model.config.batch_size)) {
    std::vector<const EncodedSeq*> items;
    for (auto i : idx) items.push_back(&enc[i]);
    const auto batch = make_seq_batch(items);
    const std::size_t n = seq_tokens(batch);
    sum += static_cast<double>(seq2seq_loss<float>(model.params, batch, nullptr)) * static_cast<double>(n);
    count += n;
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

double evaluate_tagger_loss(const TaggerModel& model, std::span<const TrainingExample> data) {
  const auto enc = encode_tag(model.vocab, data);
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& idx : eval_batches(enc.size(), model.config.batch_size)) {
    std::vector<const EncodedTag*> items;
    for (auto i : idx) items.push_back(&enc[i]);
    const auto batch = make_tag_batch(items);
    const std::size_t n = tag_tokens(batch);
    sum += static_cast<double>(tagger_loss<float>(model.params, batch, nullptr)) * static_cast<double>(n);
    count += n;
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

DecodeTrace greedy_decode_trace(const Seq2SeqModel& model, std::string_view input) {
  if (input.empty()) throw Error(ErrorCode::EmptySequence, "cannot decode an empty input");
  const auto& p = model.params;
  const auto& vocab = model.vocab;
  const std::vector<int> ids = vocab.encode(input);
  const int len = static_cast<int>(ids.size());
  const Eigen::Index H = p.enc_fwd.hidden();
  const Eigen::Index Hd = p.dec.hidden();
  const Matrix<float> zero = Matrix<float>::Zero(H, 1);
  const auto fw = lstm_forward(p.enc_fwd, ids, len, 1, false, zero, zero);
  const auto bw = lstm_forward(p.enc_bwd, ids, len, 1, true, zero, zero);
  Matrix<float> s(4 * H, 1);
  s << fw.h_final(), bw.h_final(), fw.c_final(), bw.c_final();
  Matrix<float> z = p.bridge.W * s + p.bridge.b;
  Matrix<float> h = z.topRows(Hd);
  Matrix<float> c = z.bottomRows(Hd);

  DecodeTrace trace;
  const int cap = len + model.config.max_decode_margin;
  int prev = vocab.start_index();
  for (int step = 0; step < cap; ++step) {
    std::vector<int> cur{prev};
    const auto tape = lstm_forward(p.dec, cur, 1, 1, false, h, c);
    h = tape.h.back();
    c = tape.c.back();
    Matrix<float> logits = p.out.W * h + p.out.b;
    const Matrix<float> lp = log_softmax(logits);
    std::vector<double> probs(static_cast<std::size_t>(lp.rows()));
    int best = 0;
    for (Eigen::Index k = 0; k < lp.rows(); ++k) {
      probs[static_cast<std::size_t>(k)] = std::exp(static_cast<double>(lp(k, 0)));
      if (lp(k, 0) > lp(best, 0)) best = static_cast<int>(k);
    }
    trace.probs.push_back(std::move(probs));
    if (best == vocab.end_index()) {
      trace.reached_end = true;
      break;
    }
    if (best != vocab.pad_index() && best != vocab.start_index()) {
      trace.text.push_back(vocab.token(best));
    }
    prev = best == vocab.pad_index() ? -1 : best;
  }
  return trace;
}

std::string greedy_decode(const Seq2SeqModel& model, std::string_view input) {
  return greedy_decode_trace(model, input).text;
}

std::vector<float> tag_scores(const TaggerModel& model, std::string_view input) {
  if (input.empty()) throw Error(ErrorCode::EmptySequence, "cannot tag an empty input");
  const auto& p = model.params;
  const std::vector<int> ids = model.vocab.encode(input);
  const int len = static_cast<int>(ids.size());
  const Eigen::Index H = p.enc_fwd.hidden();
  const Matrix<float> zero = Matrix<float>::Zero(H, 1);
  const auto fw = lstm_forward(p.enc_fwd, ids, len, 1, false, zero, zero);
  const auto bw = lstm_forward(p.enc_bwd, ids, len, 1, true, zero, zero);
  std::vector<float> out(static_cast<std::size_t>(len));
  for (int t = 0; t < len; ++t) {
    Matrix<float> o(2 * H, 1);
    o << fw.h[static_cast<std::size_t>(fw.step(t))], bw.h[static_cast<std::size_t>(bw.step(t))];
    const Matrix<float> pre = p.head.W * o + p.head.b;
    out[static_cast<std::size_t>(t)] = sigmoid<float>(pre)(0, 0);
  }
  return out;
}

// ---------------------------------------------------------------------------

double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max(std::abs(analytic) + std::abs(numeric), 1e-6);
}

namespace {

constexpr double kFdStep = 1e-5;

template <typename P, typename B, typename LossFn>
GradCheckResult check_impl(const P& params, const B& batch, LossFn loss) {
  P analytic = zeros_like(params);
  loss(params, batch, &analytic);
  P probe = params;
  std::vector<Matrix<double>*> probe_ms;
  std::vector<const Matrix<double>*> grad_ms;
  for_each_matrix(probe, [&](Matrix<double>& m) { probe_ms.push_back(&m); });
  for_each_matrix(analytic, [&](const Matrix<double>& m) { grad_ms.push_back(&m); });
  GradCheckResult r;
  for (std::size_t k = 0; k < probe_ms.size(); ++k) {
    Matrix<double>& m = *probe_ms[k];
    for (Eigen::Index j = 0; j < m.size(); ++j) {
      const double orig = m.data()[j];
      m.data()[j] = orig + kFdStep;
      const double up = loss(probe, batch, nullptr);
      m.data()[j] = orig - kFdStep;
      const double down = loss(probe, batch, nullptr);
      m.data()[j] = orig;
      const double numeric = (up - down) / (2 * kFdStep);
      const double a = grad_ms[k]->data()[j];
      r.max_rel_error = std::max(r.max_rel_error, relative_error(a, numeric));
      r.max_abs_analytic = std::max(r.max_abs_analytic, std::abs(a));
      r.max_abs_numeric = std::max(r.max_abs_numeric, std::abs(numeric));
      ++r.parameters;
    }
  }
  return r;
}

template <typename P>
void randomize(P& p, Rng& rng) {
  for_each_matrix(p, [&](Matrix<double>& m) {
    for (Eigen::Index j = 0; j < m.size(); ++j) m.data()[j] = rng.uniform(-0.5, 0.5);
  });
}

}  // namespace

GradCheckResult check_gradients(const Seq2SeqParams<double>& p, const SeqBatch& batch) {
  return check_impl(p, batch, [](const Seq2SeqParams<double>& q, const SeqBatch& b, Seq2SeqParams<double>* g) {
    return seq2seq_loss<double>(q, b, g);
  });
}

GradCheckResult check_gradients(const TaggerParams<double>& p, const TagBatch& batch) {
  return check_impl(p, batch, [](const TaggerParams<double>& q, const TagBatch& b, TaggerParams<double>* g) {
    return tagger_loss<double>(q, b, g);
  });
}

GradCheckResult gradient_check(ModelKind kind, GradCheckSize size, std::uint64_t seed) {
  if (size.vocab < 5 || size.hidden < 1 || size.max_len < 2 || size.batch < 1) {
    throw Error(ErrorCode::InvalidConfig, "gradient check instance too small");
  }
  Rng rng(seed);
  std::vector<std::string> letters;
  for (int k = 0; k < size.vocab - 4; ++k) letters.emplace_back(1, static_cast<char>('a' + k));
  const Vocabulary vocab = Vocabulary::build(letters);
  const int n_letters = size.vocab - 4;
  auto random_word = [&](int min_len, int max_len) {
    const int len = min_len + static_cast<int>(rng.below(static_cast<std::size_t>(max_len - min_len + 1)));
    std::string w;
    for (int k = 0; k < len; ++k) w.push_back(letters[rng.below(static_cast<std::size_t>(n_letters))][0]);
    return w;
  };

  TrainConfig cfg;
  cfg.hidden_size = size.hidden;
  cfg.seed = seed;
  if (kind == ModelKind::Seq2Seq) {
    auto p = cast_params<double>(make_seq2seq(vocab, cfg).params);
    randomize(p, rng);
    std::vector<EncodedSeq> items;
    for (int b = 0; b < size.batch; ++b) {
      const std::string in = random_word(1, size.max_len);
      // '+' inside targets exercises the separator token.
      std::string body = random_word(0, size.max_len - 3);
      if (!body.empty() && b % 2 == 1) body.insert(body.size() / 2, 1, '+');
      items.push_back({vocab.encode(in), vocab.encode("&" + body + "$")});
    }
    std::vector<const EncodedSeq*> ptrs;
    for (const auto& it : items) ptrs.push_back(&it);
    return check_gradients(p, make_seq_batch(ptrs));
  }
  auto p = cast_params<double>(make_tagger(vocab, cfg).params);
  randomize(p, rng);
  std::vector<EncodedTag> items;
  for (int b = 0; b < size.batch; ++b) {
    const std::string in = random_word(1, size.max_len);
    std::vector<float> labels(in.size());
    for (auto& l : labels) l = static_cast<float>(rng.below(2));
    items.push_back({vocab.encode(in), labels});
  }
  std::vector<const EncodedTag*> ptrs;
  for (const auto& it : items) ptrs.push_back(&it);
  return check_gradients(p, make_tag_batch(ptrs));
}

template LstmState<float> lstm_step(const LstmParams<float>&, const Vector<float>&, const LstmState<float>&);
template LstmState<double> lstm_step(const LstmParams<double>&, const Vector<double>&, const LstmState<double>&);
template BiLstmOutput<float> bilstm_encode(const LstmParams<float>&, const LstmParams<float>&,
                                           const std::vector<Vector<float>>&);
template BiLstmOutput<double> bilstm_encode(const LstmParams<double>&, const LstmParams<double>&,
                                            const std::vector<Vector<double>>&);
template float seq2seq_loss(const Seq2SeqParams<float>&, const SeqBatch&, Seq2SeqParams<float>*);
template double seq2seq_loss(const Seq2SeqParams<double>&, const SeqBatch&, Seq2SeqParams<double>*);
template float tagger_loss(const TaggerParams<float>&, const TagBatch&, TaggerParams<float>*);
template double tagger_loss(const TaggerParams<double>&, const TagBatch&, TaggerParams<double>*);
template void rmsprop_update(Matrix<float>&, const Matrix<float>&, Matrix<float>&, float, float, float);
template void rmsprop_update(Matrix<double>&, const Matrix<double>&, Matrix<double>&, double, double, double);

}  // namespace sandhi::nn
