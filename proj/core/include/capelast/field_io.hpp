#pragma once

// Binary field dumps: one ASCII header line "CAPELAST1 nx ny nz b kind" followed by
// little-endian float64 samples in x1-fastest order. kind is "surface" or "volume"
// (nz is 1 for surface dumps).

#include <filesystem>
#include <variant>

#include "capelast/grid.hpp"

namespace capelast {

void write_field(const std::filesystem::path& path, const VolumeField& f, double depth);
void write_field(const std::filesystem::path& path, const SurfaceField& f, double depth);

struct FieldDump {
  int nx = 0;
  int ny = 0;
  int nz = 0;
  double depth = 0.0;
  std::variant<SurfaceField, VolumeField> field;
};

/// Throws Error on a malformed header or a truncated payload.
FieldDump read_field(const std::filesystem::path& path);

}  // namespace capelast
