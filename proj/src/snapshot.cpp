#include "ravflow/snapshot.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "ravflow/errors.hpp"

namespace ravflow {

namespace {

constexpr std::array<char, 4> kMagic{'R', 'A', 'V', 'F'};

template <typename T>
void put_le(std::vector<unsigned char>& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  out.insert(out.end(), bytes.begin(), bytes.end());
}

template <typename T>
T get_le(const std::vector<unsigned char>& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw IoError("truncated RAVF snapshot");
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), in.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  pos += sizeof(T);
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const Field& field, double t) {
  const Grid2D& g = field.grid();
  std::vector<unsigned char> buf;
  buf.reserve(4 + 3 * 4 + 3 * 8 + 8 * field.size());
  buf.insert(buf.end(), kMagic.begin(), kMagic.end());
  put_le<std::uint32_t>(buf, kSnapshotVersion);
  put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(g.nx()));
  put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(g.ny()));
  put_le<double>(buf, g.lx());
  put_le<double>(buf, g.ly());
  put_le<double>(buf, t);
  for (double v : field.values()) put_le<double>(buf, v);

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open snapshot for writing: " + path.string());
  os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!os) throw IoError("failed writing snapshot: " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open snapshot: " + path.string());
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(is)),
                                 std::istreambuf_iterator<char>());
  if (buf.size() < 4 || std::memcmp(buf.data(), kMagic.data(), 4) != 0) {
    throw IoError("not a RAVF snapshot: " + path.string());
  }
  std::size_t pos = 4;
  const auto version = get_le<std::uint32_t>(buf, pos);
  if (version != kSnapshotVersion) {
    throw IoError("unsupported RAVF version in " + path.string());
  }
  const auto nx = get_le<std::uint32_t>(buf, pos);
  const auto ny = get_le<std::uint32_t>(buf, pos);
  const double lx = get_le<double>(buf, pos);
  const double ly = get_le<double>(buf, pos);
  const double t = get_le<double>(buf, pos);
  Grid2D grid(static_cast<int>(nx), static_cast<int>(ny), lx, ly);
  std::vector<double> values(grid.size());
  for (double& v : values) v = get_le<double>(buf, pos);
  if (pos != buf.size()) throw IoError("trailing bytes in RAVF snapshot: " + path.string());
  return Snapshot{Field(grid, std::move(values)), t};
}

}  // namespace ravflow
