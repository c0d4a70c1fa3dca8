#include "decaf/export.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <vector>

#include "decaf/errors.hpp"

namespace decaf {

Slice extract_slice(const PermittivityVolume& v, char axis, int index,
                    bool imag_channel) {
  const Grid3D& g = v.grid;
  if (imag_channel && !v.complex_pair())
    throw ConfigError("volume has no imaginary channel");
  const std::vector<Slice>& ch = imag_channel ? v.im : v.re;
  switch (axis) {
    case 'z': {
      if (index < 0 || index >= g.nz) throw ConfigError("z index out of range");
      return ch[static_cast<size_t>(index)];
    }
    case 'x': {
      if (index < 0 || index >= g.nx) throw ConfigError("x index out of range");
      Slice out(g.ny, g.nz);
      for (int q = 0; q < g.nz; ++q)
        for (int j = 0; j < g.ny; ++j) out(j, q) = ch[q](index, j);
      return out;
    }
    case 'y': {
      if (index < 0 || index >= g.ny) throw ConfigError("y index out of range");
      Slice out(g.nx, g.nz);
      for (int q = 0; q < g.nz; ++q)
        for (int i = 0; i < g.nx; ++i) out(i, q) = ch[q](i, index);
      return out;
    }
    default:
      throw ConfigError("axis must be x, y, or z");
  }
}

void write_png16(const std::string& path, const Slice& img, double lo, double hi) {
  const int width = static_cast<int>(img.rows());
  const int height = static_cast<int>(img.cols());
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw IoError("cannot open " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    if (png) png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw IoError("png writer setup failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw IoError("png encoding failed: " + path);
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width),
               static_cast<png_uint_32>(height), 16, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  const double scale = hi > lo ? 65535.0 / (hi - lo) : 0.0;
  std::vector<unsigned char> row(static_cast<size_t>(width) * 2);
  for (int j = 0; j < height; ++j) {
    for (int i = 0; i < width; ++i) {
      double v = (img(i, j) - lo) * scale;
      v = std::min(65535.0, std::max(0.0, std::round(v)));
      const auto code = static_cast<unsigned>(v);
      row[static_cast<size_t>(i) * 2] = static_cast<unsigned char>(code >> 8);
      row[static_cast<size_t>(i) * 2 + 1] = static_cast<unsigned char>(code & 0xff);
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);

  nlohmann::json side{{"min", lo}, {"max", hi}, {"width", width}, {"height", height}};
  std::ofstream out(path + ".json");
  if (!out) throw IoError("cannot open " + path + ".json");
  out << side.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path + ".json");
}

void write_slice_csv(const std::string& path, const Slice& img) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path);
  char buf[64];
  for (int j = 0; j < img.cols(); ++j) {
    for (int i = 0; i < img.rows(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.9g", img(i, j));
      out << buf << (i + 1 < img.rows() ? "," : "\n");
    }
  }
  if (!out) throw IoError("write failed: " + path);
}

void write_profile_csv(const std::string& path, const Slice& img, int x0, int y0,
                       int x1, int y1) {
  const auto inside = [&](int x, int y) {
    return x >= 0 && x < img.rows() && y >= 0 && y < img.cols();
  };
  if (!inside(x0, y0) || !inside(x1, y1))
    throw ConfigError("profile endpoints out of range");
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path);
  out << "step,x,y,value\n";
  const int n = std::max(std::abs(x1 - x0), std::abs(y1 - y0)) + 1;
  char buf[64];
  for (int k = 0; k < n; ++k) {
    const double t = n > 1 ? static_cast<double>(k) / (n - 1) : 0.0;
    const int x = static_cast<int>(std::lround(x0 + t * (x1 - x0)));
    const int y = static_cast<int>(std::lround(y0 + t * (y1 - y0)));
    std::snprintf(buf, sizeof(buf), "%d,%d,%d,%.9g\n", k, x, y, img(x, y));
    out << buf;
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace decaf
