#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "cwgan/data.hpp"
#include "cwgan/networks.hpp"

namespace cwgan {

// Model file layout (all integers little-endian):
//   magic "CWG1" | u32 version | u32 seg_len | u32 latent_dim | u32 n_tensors
//   then per tensor:
//   u32 name_len | name bytes | u32 rows | u32 cols | u32 crc32(payload) |
//   rows*cols little-endian 32-bit reals
inline constexpr char kModelMagic[4] = {'C', 'W', 'G', '1'};
inline constexpr std::uint32_t kModelVersion = 1;

namespace detail {

inline const std::array<std::uint32_t, 256>& crc32_table() {
  static const std::array<std::uint32_t, 256> table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  return table;
}

inline std::uint32_t crc32(const unsigned char* data, std::size_t len) {
  const auto& table = crc32_table();
  std::uint32_t c = 0xFFFFFFFFu;
  for (std::size_t i = 0; i < len; ++i) c = table[(c ^ data[i]) & 0xFFu] ^ (c >> 8);
  return c ^ 0xFFFFFFFFu;
}

inline void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
  out.push_back(static_cast<char>((v >> 16) & 0xFF));
  out.push_back(static_cast<char>((v >> 24) & 0xFF));
}

inline void put_f32(std::string& out, float v) {
  put_u32(out, std::bit_cast<std::uint32_t>(v));
}

struct ByteReader {
  const unsigned char* p;
  std::size_t left;
  std::string source;

  void need(std::size_t n) const {
    if (left < n) throw CorruptionError("truncated model file: " + source);
  }
  std::uint32_t u32() {
    need(4);
    const std::uint32_t v = static_cast<std::uint32_t>(p[0]) |
                            static_cast<std::uint32_t>(p[1]) << 8 |
                            static_cast<std::uint32_t>(p[2]) << 16 |
                            static_cast<std::uint32_t>(p[3]) << 24;
    p += 4;
    left -= 4;
    return v;
  }
  std::string str(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(p), n);
    p += n;
    left -= n;
    return s;
  }
};

inline void serialize_tensor(std::string& out, const std::string& name, const MatF& m) {
  put_u32(out, static_cast<std::uint32_t>(name.size()));
  out += name;
  put_u32(out, static_cast<std::uint32_t>(m.rows));
  put_u32(out, static_cast<std::uint32_t>(m.cols));
  std::string payload;
  payload.reserve(m.size() * 4);
  for (float v : m.data) put_f32(payload, v);
  put_u32(out, crc32(reinterpret_cast<const unsigned char*>(payload.data()), payload.size()));
  out += payload;
}

inline std::vector<std::string> tensor_names() {
  std::vector<std::string> names;
  for (const char* net : {"gen", "critic"}) {
    names.push_back(std::string(net) + ".embed");
    for (const char* layer : {"fc1", "fc2", "fc3", "out"}) {
      names.push_back(std::string(net) + "." + layer + ".weight");
      names.push_back(std::string(net) + "." + layer + ".bias");
    }
  }
  return names;
}

}  // namespace detail

inline std::string serialize_model(const GeneratorNet<float>& gen,
                                   const CriticNet<float>& critic) {
  std::string out(kModelMagic, 4);
  detail::put_u32(out, kModelVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(gen.seg_len));
  detail::put_u32(out, static_cast<std::uint32_t>(gen.latent_dim));

  const auto names = detail::tensor_names();
  std::vector<const Parameter<float>*> params = gen.parameters();
  const auto critic_params = critic.parameters();
  params.insert(params.end(), critic_params.begin(), critic_params.end());
  detail::put_u32(out, static_cast<std::uint32_t>(params.size()));
  for (std::size_t i = 0; i < params.size(); ++i)
    detail::serialize_tensor(out, names[i], params[i]->value);
  return out;
}

inline void save_model(const GeneratorNet<float>& gen, const CriticNet<float>& critic,
                       const std::filesystem::path& path) {
  atomic_write_file(path, serialize_model(gen, critic));
}

inline std::pair<GeneratorNet<float>, CriticNet<float>> load_model(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file: " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  detail::ByteReader r{reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(),
                       path.string()};
  if (r.str(4) != std::string(kModelMagic, 4))
    throw FormatError("bad magic in " + path.string() + ", not a model file");
  const std::uint32_t version = r.u32();
  if (version != kModelVersion)
    throw FormatError("unsupported model version " + std::to_string(version) + " in " +
                      path.string());
  const int seg_len = static_cast<int>(r.u32());
  const int latent_dim = static_cast<int>(r.u32());
  if (seg_len < 1 || latent_dim < 1) throw CorruptionError("bad dims in " + path.string());
  const std::uint32_t n_tensors = r.u32();

  GeneratorNet<float> gen(latent_dim, seg_len);
  CriticNet<float> critic(seg_len);
  std::vector<Parameter<float>*> params = gen.parameters();
  const auto critic_params = critic.parameters();
  params.insert(params.end(), critic_params.begin(), critic_params.end());
  const auto names = detail::tensor_names();
  if (n_tensors != params.size())
    throw CorruptionError("expected " + std::to_string(params.size()) + " tensors, found " +
                          std::to_string(n_tensors));

  for (std::size_t i = 0; i < params.size(); ++i) {
    const std::uint32_t name_len = r.u32();
    if (name_len > 256) throw CorruptionError("implausible tensor name length");
    const std::string name = r.str(name_len);
    if (name != names[i])
      throw CorruptionError("unexpected tensor '" + name + "', expected '" + names[i] + "'");
    const int rows = static_cast<int>(r.u32());
    const int cols = static_cast<int>(r.u32());
    MatF& dst = params[i]->value;
    if (rows != dst.rows || cols != dst.cols)
      throw CorruptionError("tensor '" + name + "' has shape " + std::to_string(rows) + "x" +
                            std::to_string(cols) + ", expected " + dst.shape_str());
    const std::uint32_t want_crc = r.u32();
    const std::size_t payload_len = dst.size() * 4;
    r.need(payload_len);
    if (detail::crc32(r.p, payload_len) != want_crc)
      throw CorruptionError("checksum mismatch in tensor '" + name + "'");
    for (std::size_t j = 0; j < dst.size(); ++j) {
      std::uint32_t bits = static_cast<std::uint32_t>(r.p[4 * j]) |
                           static_cast<std::uint32_t>(r.p[4 * j + 1]) << 8 |
                           static_cast<std::uint32_t>(r.p[4 * j + 2]) << 16 |
                           static_cast<std::uint32_t>(r.p[4 * j + 3]) << 24;
      dst.data[j] = std::bit_cast<float>(bits);
    }
    r.p += payload_len;
    r.left -= payload_len;
  }
  if (r.left != 0) throw CorruptionError("trailing bytes in " + path.string());
  return {std::move(gen), std::move(critic)};
}

}  // namespace cwgan
