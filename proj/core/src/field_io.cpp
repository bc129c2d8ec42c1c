#include "capelast/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "capelast/error.hpp"

namespace capelast {

namespace {

void put_le(std::ostream& os, double x) {
  auto u = std::bit_cast<std::uint64_t>(x);
  char bytes[8];
  for (int n = 0; n < 8; ++n) bytes[n] = static_cast<char>((u >> (8 * n)) & 0xffu);
  os.write(bytes, 8);
}

double get_le(const unsigned char* p) {
  std::uint64_t u = 0;
  for (int n = 7; n >= 0; --n) u = (u << 8) | p[n];
  return std::bit_cast<double>(u);
}

void write_samples(const std::filesystem::path& path, const Samples& f, int nx, int ny, int nz, double depth,
                   const char* kind) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  char b[64];
  std::snprintf(b, sizeof b, "%.17g", depth);
  os << "CAPELAST1 " << nx << ' ' << ny << ' ' << nz << ' ' << b << ' ' << kind << '\n';
  for (std::size_t n = 0; n < f.size(); ++n) put_le(os, f[n]);
  if (!os) throw Error("write failed: " + path.string());
}

}  // namespace

void write_field(const std::filesystem::path& path, const VolumeField& f, double depth) {
  write_samples(path, f, f.nx(), f.ny(), f.nz(), depth, "volume");
}

void write_field(const std::filesystem::path& path, const SurfaceField& f, double depth) {
  write_samples(path, f, f.nx(), f.ny(), 1, depth, "surface");
}

FieldDump read_field(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path.string());
  std::string header;
  std::getline(is, header);
  std::istringstream hs(header);
  std::string magic, kind;
  FieldDump d;
  hs >> magic >> d.nx >> d.ny >> d.nz >> d.depth >> kind;
  if (!hs || magic != "CAPELAST1" || d.nx <= 0 || d.ny <= 0 || d.nz <= 0 || (kind != "surface" && kind != "volume"))
    throw Error("malformed field header in " + path.string());
  if (kind == "surface" && d.nz != 1) throw Error("surface dump with nz != 1 in " + path.string());

  const std::size_t count = static_cast<std::size_t>(d.nx) * d.ny * d.nz;
  std::vector<unsigned char> raw(count * 8);
  is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(is.gcount()) != raw.size()) throw Error("truncated field payload in " + path.string());

  auto fill = [&](Samples& f) {
    for (std::size_t n = 0; n < count; ++n) f[n] = get_le(raw.data() + 8 * n);
  };
  if (kind == "surface") {
    SurfaceField f(d.nx, d.ny);
    fill(f);
    d.field = std::move(f);
  } else {
    VolumeField f(d.nx, d.ny, d.nz);
    fill(f);
    d.field = std::move(f);
  }
  return d;
}

}  // namespace capelast
