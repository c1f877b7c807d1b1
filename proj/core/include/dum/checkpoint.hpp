#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "dum/variance_net.hpp"

namespace dum {

// Checkpoint wire format, all integers and doubles little-endian:
//   bytes 0-7   magic "DUMCKPT1"
//   u32         format version (currently 1)
//   u32 u32     input dim d, hidden dim h
//   f64[]       parameters row-major, in order w1 b1 w2 b2 w3 b3
//   u32 + utf8  length-prefixed JSON config snapshot
inline constexpr char kCheckpointMagic[8] = {'D', 'U', 'M', 'C', 'K', 'P', 'T', '1'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::filesystem::path& file, const VarianceNet& net,
                     const std::string& config_json);

struct Checkpoint {
  VarianceNet net;
  std::string config_json;
};

// Throws FormatError on bad magic, an unsupported version, truncation or
// trailing bytes.
Checkpoint load_checkpoint(const std::filesystem::path& file);

}  // namespace dum
