#pragma once

// RAVF field snapshots. Layout, all little-endian:
//   "RAVF" | u32 version (=1) | u32 nx | u32 ny | f64 Lx | f64 Ly | f64 t |
//   nx*ny f64 values, row-major over [ny][nx].

#include <cstdint>
#include <filesystem>

#include "ravflow/grid.hpp"

namespace ravflow {

inline constexpr std::uint32_t kSnapshotVersion = 1;

struct Snapshot {
  Field field;
  double t;
};

void write_snapshot(const std::filesystem::path& path, const Field& field, double t);
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace ravflow
