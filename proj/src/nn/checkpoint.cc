#include "pivotqg/nn/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>

#include "pivotqg/common/error.h"

namespace pivotqg::nn {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'P', 'Q', 'G', 'C', 'K', 'P', 'T', '\0'};

[[noreturn]] void bad(const std::string& path, const std::string& why) {
  throw Error(Errc::BadCheckpoint, "checkpoint '" + path + "': " + why);
}

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
bool read_pod(std::ifstream& in, T& v) {
  return static_cast<bool>(in.read(reinterpret_cast<char*>(&v), sizeof(T)));
}

}  // namespace

void write_checkpoint(const std::string& path, const std::string& kind,
                      const nlohmann::json& meta, const ParameterSet& params) {
  nlohmann::json header = {{"kind", kind}, {"meta", meta}, {"tensors", nlohmann::json::array()}};
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& p = params.at(i);
    header["tensors"].push_back({{"name", p.name}, {"rows", p.value.rows()}, {"cols", p.value.cols()}});
  }
  const std::string text = header.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) bad(path, "cannot open for writing");
  out.write(kMagic, sizeof(kMagic));
  write_pod(out, kCheckpointVersion);
  write_pod(out, static_cast<std::uint64_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& v = params.at(i).value;
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
  }
  if (!out) bad(path, "write failed");
}

CheckpointContents read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad(path, "cannot open");
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    bad(path, "not a checkpoint (bad magic)");
  }
  std::uint32_t version = 0;
  if (!read_pod(in, version)) bad(path, "truncated header");
  if (version != kCheckpointVersion) bad(path, "unsupported format version " + std::to_string(version));
  std::uint64_t header_len = 0;
  if (!read_pod(in, header_len) || header_len > (1ull << 32)) bad(path, "bad header length");
  std::string text(header_len, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(header_len))) bad(path, "truncated header");

  CheckpointContents out;
  try {
    const auto header = nlohmann::json::parse(text);
    out.kind = header.at("kind").get<std::string>();
    out.meta = header.at("meta");
    for (const auto& t : header.at("tensors")) {
      const auto rows = t.at("rows").get<Eigen::Index>();
      const auto cols = t.at("cols").get<Eigen::Index>();
      if (rows < 0 || cols < 0) bad(path, "negative tensor shape");
      Matrix m(rows, cols);
      if (!in.read(reinterpret_cast<char*>(m.data()),
                   static_cast<std::streamsize>(m.size() * sizeof(double)))) {
        bad(path, "truncated tensor data");
      }
      out.tensors.emplace(t.at("name").get<std::string>(), std::move(m));
    }
  } catch (const nlohmann::json::exception& e) {
    bad(path, std::string("bad header: ") + e.what());
  }
  return out;
}

void restore_parameters(const CheckpointContents& contents, ParameterSet& params) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = params.at(i);
    auto it = contents.tensors.find(p.name);
    if (it == contents.tensors.end()) {
      throw Error(Errc::BadCheckpoint, "checkpoint lacks tensor '" + p.name + "'");
    }
    if (it->second.rows() != p.value.rows() || it->second.cols() != p.value.cols()) {
      throw Error(Errc::BadCheckpoint, "tensor '" + p.name + "' has the wrong shape");
    }
    p.value = it->second;
  }
}

}  // namespace pivotqg::nn
