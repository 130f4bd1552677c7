#include "sandhi/joiner.hpp"

#include "sandhi/checkpoint.hpp"
#include "sandhi/error.hpp"

namespace sandhi {
namespace {

std::vector<TrainingExample> joiner_examples(std::span<const SandhiTriple> triples, Truncation trunc) {
  std::vector<AnnotatedTriple> wrapped;
  wrapped.reserve(triples.size());
  for (const auto& t : triples) wrapped.push_back({t, {}});
  return make_stage_examples(wrapped, StageKind::Joiner, trunc);
}

}  // namespace

void JoinerConfig::validate() const {
  if (trunc.n < 2 || trunc.m < 1) {
    throw Error(ErrorCode::InvalidConfig, "joiner truncation needs n >= 2 and m >= 1");
  }
  train.validate();
}

TruncationPlan truncate_pair(std::string_view w1, std::string_view w2, const JoinerConfig& cfg) {
  return truncate_pair(w1, w2, cfg.trunc);
}

std::string join(const nn::Seq2SeqModel& model, std::string_view w1, std::string_view w2, Truncation trunc) {
  const TruncationPlan plan = truncate_pair(w1, w2, trunc);
  const std::string core = nn::greedy_decode(model, plan.model_input());
  if (core.empty()) {
    throw Error(ErrorCode::MalformedDecode, "decoded an empty compound core");
  }
  if (core.find(Vocabulary::kSeparator) != std::string::npos) {
    throw Error(ErrorCode::MalformedDecode, "decoded core '" + core + "' contains '+'");
  }
  return plan.prefix + core + plan.suffix;
}

std::string join(const JoinerModel& model, std::string_view w1, std::string_view w2) {
  return join(model.net, w1, w2, model.trunc);
}

JoinerTraining train_joiner(std::span<const SandhiTriple> train, std::span<const SandhiTriple> validation,
                            const JoinerConfig& cfg, const nn::EpochCallback& on_epoch) {
  cfg.validate();
  const auto tr = joiner_examples(train, cfg.trunc);
  const auto va = joiner_examples(validation, cfg.trunc);
  if (tr.empty()) throw Error(ErrorCode::EmptyDataset, "no joiner training examples");
  std::vector<std::string> seqs;
  for (const auto* set : {&tr, &va}) {
    for (const auto& ex : *set) {
      seqs.push_back(ex.input);
      seqs.push_back(ex.target);
    }
  }
  JoinerTraining out;
  out.model.trunc = cfg.trunc;
  out.model.net = nn::make_seq2seq(Vocabulary::build(seqs), cfg.train);
  out.history = nn::train_seq2seq(out.model.net, tr, va, cfg.train, on_epoch);
  return out;
}

void save_joiner(const JoinerModel& model, const std::filesystem::path& path) {
  Checkpoint c;
  c.kind = "joiner";
  c.extra = {{"n", model.trunc.n}, {"m", model.trunc.m}};
  c.model = model.net;
  save_checkpoint(c, path);
}

JoinerModel load_joiner(const std::filesystem::path& path) {
  nlohmann::json extra;
  JoinerModel m;
  m.net = load_seq2seq(path, "joiner", &extra);
  m.trunc.n = extra.value("n", std::size_t{5});
  m.trunc.m = extra.value("m", std::size_t{2});
  return m;
}

}  // namespace sandhi
