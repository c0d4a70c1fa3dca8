#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "decaf/errors.hpp"

// Little-endian scalar readers/writers shared by the on-disk formats.
// The host is assumed little-endian (checked once at stream creation).

namespace decaf::detail {

inline void check_little_endian() {
  const std::uint16_t probe = 0x0102;
  if (*reinterpret_cast<const std::uint8_t*>(&probe) != 0x02)
    throw IoError("file formats require a little-endian host");
}

inline std::ofstream open_write(const std::string& path) {
  check_little_endian();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

inline std::ifstream open_read(const std::string& path) {
  check_little_endian();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  return in;
}

template <class T>
void write_scalar(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_scalar(std::istream& in, const char* what) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw IoError(std::string("truncated file while reading ") + what);
  return v;
}

inline void write_magic(std::ostream& out, const char magic[5]) {
  out.write(magic, 4);
}

inline void expect_magic(std::istream& in, const char magic[5]) {
  char buf[4];
  in.read(buf, 4);
  if (!in || std::string(buf, 4) != std::string(magic, 4))
    throw IoError(std::string("bad magic, expected ") + magic);
}

inline void write_f32_array(std::ostream& out, const double* p, long n) {
  std::vector<float> buf(static_cast<size_t>(n));
  for (long i = 0; i < n; ++i) buf[static_cast<size_t>(i)] = static_cast<float>(p[i]);
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
}

inline void read_f32_array(std::istream& in, double* p, long n, const char* what) {
  std::vector<float> buf(static_cast<size_t>(n));
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!in) throw IoError(std::string("truncated file while reading ") + what);
  for (long i = 0; i < n; ++i) p[i] = buf[static_cast<size_t>(i)];
}

}  // namespace decaf::detail
