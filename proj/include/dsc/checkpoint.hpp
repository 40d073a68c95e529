#pragma once

// Binary checkpoint layout, all integers and floats little-endian:
//   char[8]  "DSCCKPT1"
//   u32      version (1)
//   u32      field count (5: T, ux, uy, uz, p)
//   u64      cell count
//   u64      step
//   f64      tau
//   per field: node[ncells], node_prev[ncells], port[6 ncells],
//              port_prev[6 ncells], chan[6 ncells][3]   (all f64)

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>
#include <vector>

#include "dsc/errors.hpp"
#include "dsc/field_store.hpp"

namespace dsc {

inline constexpr char kCheckpointMagic[8] = {'D', 'S', 'C', 'C', 'K', 'P', 'T', '1'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

namespace detail {

template <class T>
void put_le(std::ostream& out, T v) {
  static_assert(sizeof(T) == 4 || sizeof(T) == 8);
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  U u = std::bit_cast<U>(v);
  unsigned char b[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<unsigned char>(u >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  unsigned char b[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(b), sizeof(T))) throw FormatError("checkpoint truncated");
  U u = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<U>(b[i]) << (8 * i);
  return std::bit_cast<T>(u);
}

}  // namespace detail

inline void write_checkpoint(std::ostream& out, const FieldStore& fs, const TimeGrid& tg) {
  out.write(kCheckpointMagic, 8);
  detail::put_le<std::uint32_t>(out, kCheckpointVersion);
  detail::put_le<std::uint32_t>(out, kNumFields);
  detail::put_le<std::uint64_t>(out, fs.num_cells());
  detail::put_le<std::uint64_t>(out, tg.step);
  detail::put_le<double>(out, tg.tau);
  for (int f = 0; f < kNumFields; ++f) {
    const auto& z = fs.field(f);
    for (double v : z.node) detail::put_le(out, v);
    for (double v : z.node_prev) detail::put_le(out, v);
    for (double v : z.port) detail::put_le(out, v);
    for (double v : z.port_prev) detail::put_le(out, v);
    for (const auto& c : z.chan)
      for (double v : c) detail::put_le(out, v);
  }
}

struct Checkpoint {
  FieldStore fields;
  TimeGrid time;
};

inline Checkpoint read_checkpoint(std::istream& in) {
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kCheckpointMagic, 8) != 0)
    throw FormatError("not a checkpoint file");
  const auto version = detail::get_le<std::uint32_t>(in);
  if (version != kCheckpointVersion)
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  if (detail::get_le<std::uint32_t>(in) != kNumFields) throw FormatError("checkpoint field count mismatch");
  const auto ncells = detail::get_le<std::uint64_t>(in);
  Checkpoint ck{FieldStore(ncells), {}};
  ck.time.step = detail::get_le<std::uint64_t>(in);
  ck.time.tau = detail::get_le<double>(in);
  for (int f = 0; f < kNumFields; ++f) {
    auto& z = ck.fields.field(f);
    for (double& v : z.node) v = detail::get_le<double>(in);
    for (double& v : z.node_prev) v = detail::get_le<double>(in);
    for (double& v : z.port) v = detail::get_le<double>(in);
    for (double& v : z.port_prev) v = detail::get_le<double>(in);
    for (auto& c : z.chan)
      for (double& v : c) v = detail::get_le<double>(in);
  }
  return ck;
}

inline void save_checkpoint(const std::string& path, const FieldStore& fs, const TimeGrid& tg) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_checkpoint(out, fs, tg);
  if (!out) throw Error("failed writing '" + path + "'");
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open checkpoint '" + path + "'");
  return read_checkpoint(in);
}

}  // namespace dsc
