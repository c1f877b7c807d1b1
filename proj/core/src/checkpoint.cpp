#include "dum/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "dum/errors.hpp"

namespace dum {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
}

void put_f64(std::string& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
  }
}

struct Reader {
  const std::string& bytes;
  std::size_t pos = 0;

  void require(std::size_t n) const {
    if (bytes.size() - pos < n) throw FormatError("truncated checkpoint");
  }
  std::uint32_t u32() {
    require(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[pos++]))
           << (8 * i);
    }
    return v;
  }
  double f64() {
    require(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[pos++]))
           << (8 * i);
    }
    return std::bit_cast<double>(v);
  }
};

std::uint64_t parameter_count(std::uint64_t d, std::uint64_t h) {
  return d * h + h + h * h + h + h * d + d;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& file, const VarianceNet& net,
                     const std::string& config_json) {
  if (config_json.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw std::invalid_argument("checkpoint config snapshot too large");
  }
  std::string out;
  out.append(kCheckpointMagic, sizeof kCheckpointMagic);
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(net.input_dim()));
  put_u32(out, static_cast<std::uint32_t>(net.hidden_dim()));
  for (const auto& p : net.params()) {
    for (double v : p.value.values()) put_f64(out, v);
  }
  put_u32(out, static_cast<std::uint32_t>(config_json.size()));
  out += config_json;

  std::ofstream f(file, std::ios::binary);
  if (!f.write(out.data(), static_cast<std::streamsize>(out.size()))) {
    throw std::runtime_error("cannot write checkpoint " + file.string());
  }
}

Checkpoint load_checkpoint(const std::filesystem::path& file) {
  std::ifstream f(file, std::ios::binary);
  if (!f) {
    throw FormatError("cannot open checkpoint " + file.string());
  }
  std::string bytes((std::istreambuf_iterator<char>(f)),
                    std::istreambuf_iterator<char>());

  if (bytes.size() < sizeof kCheckpointMagic ||
      std::memcmp(bytes.data(), kCheckpointMagic, sizeof kCheckpointMagic) != 0) {
    throw FormatError(file.string() + " is not a checkpoint (bad magic)");
  }
  Reader in{bytes, sizeof kCheckpointMagic};
  const std::uint32_t version = in.u32();
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " +
                      std::to_string(version) + " (expected " +
                      std::to_string(kCheckpointVersion) + ")");
  }
  const std::uint32_t d = in.u32();
  const std::uint32_t h = in.u32();
  if (d == 0 || h == 0) {
    throw FormatError("checkpoint declares zero-sized network");
  }
  // Check the declared payload against the actual file size before
  // allocating anything of that order.
  const std::uint64_t expected = parameter_count(d, h) * 8;
  if (bytes.size() - in.pos < expected) {
    throw FormatError("truncated checkpoint");
  }

  Checkpoint ckpt{VarianceNet(d, h), {}};
  for (auto& p : ckpt.net.params()) {
    Matrix& value = p.value;
    for (std::size_t r = 0; r < value.rows(); ++r) {
      for (std::size_t c = 0; c < value.cols(); ++c) {
        value.at(r, c) = in.f64();
      }
    }
  }
  const std::uint32_t config_len = in.u32();
  in.require(config_len);
  ckpt.config_json.assign(bytes, in.pos, config_len);
  in.pos += config_len;
  if (in.pos != bytes.size()) {
    throw FormatError("checkpoint has trailing bytes");
  }
  return ckpt;
}

}  // namespace dum
