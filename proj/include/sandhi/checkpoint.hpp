#pragma once

// On-disk model format:
//
//   "SKTSNDH1" | u32 LE header length | UTF-8 JSON header | f32 LE payload | u32 LE CRC32
//
// The JSON header records the format version, the checkpoint kind
// ("joiner", "tagger", "wsplitter"), the architecture, dimensions, the
// vocabulary in index order and the training configuration. The payload holds
// every parameter matrix row-major in the order visited by for_each_matrix:
//   seq2seq: enc-fwd W,U,b; enc-bwd W,U,b; bridge W,b; decoder W,U,b; output W,b
//   tagger:  enc-fwd W,U,b; enc-bwd W,U,b; head W,b
// The CRC covers every byte before it.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>

#include "json.hpp"
#include "sandhi/nn.hpp"

namespace sandhi {

inline constexpr std::string_view kCheckpointMagic = "SKTSNDH1";
inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  std::string kind;
  nlohmann::json extra = nlohmann::json::object();  // kind-specific settings
  std::variant<nn::Seq2SeqModel, nn::TaggerModel> model;
};

std::string serialize_checkpoint(const Checkpoint& ckpt);

/// Throws Error{BadMagic}, Error{ChecksumMismatch} (including truncation and
/// payload size disagreement) or Error{VersionMismatch}.
Checkpoint deserialize_checkpoint(std::string_view bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Loads and checks kind/architecture; Error{KindMismatch} otherwise.
nn::Seq2SeqModel load_seq2seq(const std::filesystem::path& path, std::string_view kind,
                              nlohmann::json* extra = nullptr);
nn::TaggerModel load_tagger(const std::filesystem::path& path, nlohmann::json* extra = nullptr);

nlohmann::json to_json(const nn::TrainConfig& cfg);
/// Unknown keys or wrongly typed values raise Error{InvalidConfig}.
nn::TrainConfig train_config_from_json(const nlohmann::json& j, nn::TrainConfig base = {});

std::uint32_t crc32_of(std::string_view bytes);

}  // namespace sandhi
