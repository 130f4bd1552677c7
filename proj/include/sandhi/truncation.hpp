#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace sandhi {

/// How the joiner shortens its inputs: keep the last `n` chars of the first
/// word and the first `m` chars of the second.
struct Truncation {
  std::size_t n = 5;
  std::size_t m = 2;
};

/// prefix ++ t1 == w1 and t2 ++ suffix == w2.
struct TruncationPlan {
  std::string prefix;
  std::string t1;
  std::string t2;
  std::string suffix;

  /// Model input: "t1+t2".
  std::string model_input() const { return t1 + '+' + t2; }
};

/// Throws Error{EmptyWord} when either word is empty.
TruncationPlan truncate_pair(std::string_view w1, std::string_view w2, Truncation trunc = {});

/// The compound with the plan's prefix and suffix removed, or nullopt when the
/// compound does not carry them unchanged (or nothing is left between them).
std::optional<std::string> compound_core(std::string_view compound, const TruncationPlan& plan);

}  // namespace sandhi
