#include "sandhi/truncation.hpp"

#include <algorithm>

#include "sandhi/error.hpp"

namespace sandhi {

TruncationPlan truncate_pair(std::string_view w1, std::string_view w2, Truncation trunc) {
  if (w1.empty() || w2.empty()) {
    throw Error(ErrorCode::EmptyWord, "truncation needs two nonempty words");
  }
  const std::size_t keep1 = std::min(trunc.n, w1.size());
  const std::size_t keep2 = std::min(trunc.m, w2.size());
  TruncationPlan plan;
  plan.prefix = std::string(w1.substr(0, w1.size() - keep1));
  plan.t1 = std::string(w1.substr(w1.size() - keep1));
  plan.t2 = std::string(w2.substr(0, keep2));
  plan.suffix = std::string(w2.substr(keep2));
  return plan;
}

std::optional<std::string> compound_core(std::string_view compound, const TruncationPlan& plan) {
  const std::size_t flanks = plan.prefix.size() + plan.suffix.size();
  if (compound.size() <= flanks) return std::nullopt;
  if (!compound.starts_with(plan.prefix) || !compound.ends_with(plan.suffix)) return std::nullopt;
  return std::string(compound.substr(plan.prefix.size(), compound.size() - flanks));
}

}  // namespace sandhi
