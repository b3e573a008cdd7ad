#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "pivotqg/nn/parameters.h"

namespace pivotqg::nn {

// On-disk layout (little-endian):
//   8 bytes   magic "PQGCKPT\0"
//   u32       format version
//   u64       header length, then that many bytes of UTF-8 JSON:
//             {"kind": ..., "meta": {...}, "tensors": [{"name","rows","cols"}]}
//   f64[]     tensor data in header order, column-major
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointContents {
  std::string kind;
  nlohmann::json meta;
  std::map<std::string, Matrix> tensors;
};

void write_checkpoint(const std::string& path, const std::string& kind,
                      const nlohmann::json& meta, const ParameterSet& params);

// Throws BadCheckpoint on any format violation.
CheckpointContents read_checkpoint(const std::string& path);

// Copies tensors into same-named, same-shaped parameters; every parameter
// must be present.
void restore_parameters(const CheckpointContents& contents, ParameterSet& params);

}  // namespace pivotqg::nn
