#include "decaf/volume_io.hpp"

#include <cstdint>

#include "decaf/detail/binary_io.hpp"

namespace decaf {

using namespace detail;

void write_dcaf(const std::string& path, const PermittivityVolume& v) {
  v.grid.validate();
  if (v.re.size() != static_cast<size_t>(v.grid.nz) ||
      (v.complex_pair() && v.im.size() != v.re.size()))
    throw ConfigError("volume slice count does not match its grid");
  auto out = open_write(path);
  write_magic(out, "DCAF");
  write_scalar<std::uint16_t>(out, 1);
  write_scalar<std::uint32_t>(out, static_cast<std::uint32_t>(v.grid.nx));
  write_scalar<std::uint32_t>(out, static_cast<std::uint32_t>(v.grid.ny));
  write_scalar<std::uint32_t>(out, static_cast<std::uint32_t>(v.grid.nz));
  write_scalar<double>(out, v.grid.dx);
  write_scalar<double>(out, v.grid.dy);
  write_scalar<double>(out, v.grid.dz);
  write_scalar<double>(out, v.grid.z0);
  write_scalar<std::uint8_t>(out, v.complex_pair() ? 1 : 0);
  for (const auto& s : v.re) write_f32_array(out, s.data(), s.size());
  for (const auto& s : v.im) write_f32_array(out, s.data(), s.size());
  if (!out) throw IoError("write failed: " + path);
}

PermittivityVolume read_dcaf(const std::string& path) {
  auto in = open_read(path);
  expect_magic(in, "DCAF");
  const auto version = read_scalar<std::uint16_t>(in, "version");
  if (version != 1) throw IoError("unsupported volume version");
  PermittivityVolume v;
  v.grid.nx = static_cast<int>(read_scalar<std::uint32_t>(in, "nx"));
  v.grid.ny = static_cast<int>(read_scalar<std::uint32_t>(in, "ny"));
  v.grid.nz = static_cast<int>(read_scalar<std::uint32_t>(in, "nz"));
  v.grid.dx = read_scalar<double>(in, "dx");
  v.grid.dy = read_scalar<double>(in, "dy");
  v.grid.dz = read_scalar<double>(in, "dz");
  v.grid.z0 = read_scalar<double>(in, "z0");
  v.grid.validate();
  const auto flag = read_scalar<std::uint8_t>(in, "flag");
  if (flag > 1) throw IoError("unknown volume channel flag");
  v.re.assign(v.grid.nz, Slice(v.grid.nx, v.grid.ny));
  for (auto& s : v.re) read_f32_array(in, s.data(), s.size(), "re slice");
  if (flag == 1) {
    v.im.assign(v.grid.nz, Slice(v.grid.nx, v.grid.ny));
    for (auto& s : v.im) read_f32_array(in, s.data(), s.size(), "im slice");
  }
  return v;
}

}  // namespace decaf
