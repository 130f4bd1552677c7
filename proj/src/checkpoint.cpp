#include "sandhi/checkpoint.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "sandhi/error.hpp"

namespace sandhi {
namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

void put_u32(std::string& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xFF));
}

std::uint32_t get_u32(std::string_view in, std::size_t pos) {
  std::uint32_t v = 0;
  for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + k])) << (8 * k);
  return v;
}

template <typename P>
void put_params(std::string& out, const P& params) {
  nn::for_each_matrix(params, [&](const nn::Matrix<float>& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        put_u32(out, std::bit_cast<std::uint32_t>(m(r, c)));
      }
    }
  });
}

template <typename P>
std::size_t param_count(const P& params) {
  std::size_t n = 0;
  nn::for_each_matrix(params, [&](const nn::Matrix<float>& m) { n += static_cast<std::size_t>(m.size()); });
  return n;
}

template <typename P>
void get_params(std::string_view in, std::size_t pos, P& params) {
  nn::for_each_matrix(params, [&](nn::Matrix<float>& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        m(r, c) = std::bit_cast<float>(get_u32(in, pos));
        pos += 4;
      }
    }
  });
}

const Vocabulary& vocab_of(const Checkpoint& c) {
  return std::visit([](const auto& m) -> const Vocabulary& { return m.vocab; }, c.model);
}

}  // namespace

std::uint32_t crc32_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size()));
  return static_cast<std::uint32_t>(crc);
}

nlohmann::json to_json(const nn::TrainConfig& cfg) {
  return {{"hidden_size", cfg.hidden_size},       {"batch_size", cfg.batch_size},
          {"epochs", cfg.epochs},                 {"learning_rate", cfg.learning_rate},
          {"rho", cfg.rho},                       {"epsilon", cfg.epsilon},
          {"seed", cfg.seed},                     {"max_decode_margin", cfg.max_decode_margin},
          {"clip_norm", cfg.clip_norm}};
}

nn::TrainConfig train_config_from_json(const nlohmann::json& j, nn::TrainConfig base) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "training config must be a JSON object");
  auto int_field = [&](const std::string& key, const nlohmann::json& v) {
    if (!v.is_number_integer()) throw Error(ErrorCode::InvalidConfig, key + " must be an integer");
    return v.get<long long>();
  };
  auto num_field = [&](const std::string& key, const nlohmann::json& v) {
    if (!v.is_number()) throw Error(ErrorCode::InvalidConfig, key + " must be a number");
    return v.get<double>();
  };
  for (const auto& [key, v] : j.items()) {
    if (key == "hidden_size") base.hidden_size = static_cast<int>(int_field(key, v));
    else if (key == "batch_size") base.batch_size = static_cast<int>(int_field(key, v));
    else if (key == "epochs") base.epochs = static_cast<int>(int_field(key, v));
    else if (key == "learning_rate") base.learning_rate = num_field(key, v);
    else if (key == "rho") base.rho = num_field(key, v);
    else if (key == "epsilon") base.epsilon = num_field(key, v);
    else if (key == "seed") {
      if (!v.is_number_unsigned()) throw Error(ErrorCode::InvalidConfig, "seed must be a nonnegative integer");
      base.seed = v.get<std::uint64_t>();
    } else if (key == "max_decode_margin") base.max_decode_margin = static_cast<int>(int_field(key, v));
    else if (key == "clip_norm") base.clip_norm = num_field(key, v);
    else throw Error(ErrorCode::InvalidConfig, "unknown training config key '" + key + "'");
  }
  base.validate();
  return base;
}

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  const bool seq = std::holds_alternative<nn::Seq2SeqModel>(ckpt.model);
  const auto& vocab = vocab_of(ckpt);
  const nn::TrainConfig& cfg =
      std::visit([](const auto& m) -> const nn::TrainConfig& { return m.config; }, ckpt.model);
  const Eigen::Index hidden = std::visit([](const auto& m) { return m.params.enc_fwd.hidden(); }, ckpt.model);

  nlohmann::json header{
      {"format_version", kCheckpointVersion},
      {"kind", ckpt.kind},
      {"architecture", seq ? "seq2seq" : "tagger"},
      {"hidden_size", hidden},
      {"vocab_size", vocab.size()},
      {"vocab", vocab.token_strings()},
      {"train_config", to_json(cfg)},
      {"extra", ckpt.extra},
  };
  const std::string text = header.dump();

  std::string out(kCheckpointMagic);
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out += text;
  std::visit([&](const auto& m) { put_params(out, m.params); }, ckpt.model);
  put_u32(out, crc32_of(out));
  return out;
}

Checkpoint deserialize_checkpoint(std::string_view bytes) {
  if (bytes.size() < kCheckpointMagic.size() || bytes.substr(0, kCheckpointMagic.size()) != kCheckpointMagic) {
    throw Error(ErrorCode::BadMagic, "not a sandhi checkpoint");
  }
  const std::size_t fixed = kCheckpointMagic.size() + 4;
  if (bytes.size() < fixed + 4) {
    throw Error(ErrorCode::ChecksumMismatch, "checkpoint truncated");
  }
  const std::uint32_t stored = get_u32(bytes, bytes.size() - 4);
  if (stored != crc32_of(bytes.substr(0, bytes.size() - 4))) {
    throw Error(ErrorCode::ChecksumMismatch, "checkpoint CRC mismatch");
  }
  const std::uint32_t header_len = get_u32(bytes, kCheckpointMagic.size());
  if (fixed + header_len + 4 > bytes.size()) {
    throw Error(ErrorCode::ChecksumMismatch, "header length exceeds file size");
  }
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(fixed, header_len));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ChecksumMismatch, std::string("unreadable header: ") + e.what());
  }
  if (!header.contains("format_version") || header["format_version"] != kCheckpointVersion) {
    throw Error(ErrorCode::VersionMismatch,
                "checkpoint format version " + header.value("format_version", nlohmann::json()).dump() +
                    ", expected " + std::to_string(kCheckpointVersion));
  }

  Checkpoint ckpt;
  try {
    ckpt.kind = header.at("kind").get<std::string>();
    ckpt.extra = header.value("extra", nlohmann::json::object());
    const auto tokens = header.at("vocab").get<std::vector<std::string>>();
    const Vocabulary vocab = Vocabulary::from_tokens(tokens);
    nn::TrainConfig cfg = train_config_from_json(header.at("train_config"));
    cfg.hidden_size = header.at("hidden_size").get<int>();
    const std::string arch = header.at("architecture").get<std::string>();
    // make_* only shapes the parameters here; the payload overwrites them.
    if (arch == "seq2seq") {
      ckpt.model = nn::make_seq2seq(vocab, cfg);
    } else if (arch == "tagger") {
      ckpt.model = nn::make_tagger(vocab, cfg);
    } else {
      throw Error(ErrorCode::KindMismatch, "unknown architecture '" + arch + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ChecksumMismatch, std::string("malformed header: ") + e.what());
  }

  const std::size_t payload_pos = fixed + header_len;
  const std::size_t payload_len = bytes.size() - 4 - payload_pos;
  std::visit(
      [&](auto& m) {
        if (payload_len != 4 * param_count(m.params)) {
          throw Error(ErrorCode::ChecksumMismatch, "payload size disagrees with header dimensions");
        }
        get_params(bytes, payload_pos, m.params);
      },
      ckpt.model);
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  const std::string bytes = serialize_checkpoint(ckpt);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write checkpoint " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read checkpoint " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_checkpoint(buf.str());
}

nn::Seq2SeqModel load_seq2seq(const std::filesystem::path& path, std::string_view kind, nlohmann::json* extra) {
  Checkpoint c = load_checkpoint(path);
  if (c.kind != kind || !std::holds_alternative<nn::Seq2SeqModel>(c.model)) {
    throw Error(ErrorCode::KindMismatch,
                path.string() + " holds a '" + c.kind + "' model, expected '" + std::string(kind) + "'");
  }
  if (extra != nullptr) *extra = c.extra;
  return std::get<nn::Seq2SeqModel>(std::move(c.model));
}

nn::TaggerModel load_tagger(const std::filesystem::path& path, nlohmann::json* extra) {
  Checkpoint c = load_checkpoint(path);
  if (c.kind != "tagger" || !std::holds_alternative<nn::TaggerModel>(c.model)) {
    throw Error(ErrorCode::KindMismatch, path.string() + " holds a '" + c.kind + "' model, expected 'tagger'");
  }
  if (extra != nullptr) *extra = c.extra;
  return std::get<nn::TaggerModel>(std::move(c.model));
}

}  // namespace sandhi
