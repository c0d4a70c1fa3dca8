#pragma once

#include <string>

#include "decaf/volume.hpp"

namespace decaf {

/// 2D cut through a volume channel: axis 'z' gives slice `index` (nx x ny),
/// axis 'x' gives a (ny x nz) section at x = index, axis 'y' an (nx x nz)
/// section at y = index.
Slice extract_slice(const PermittivityVolume& v, char axis, int index,
                    bool imag_channel);

/// 16-bit grayscale PNG mapping [lo, hi] to [0, 65535] (constant images map
/// to 0). A JSON sidecar at path + ".json" records the value range and
/// shape so the scaling stays invertible.
void write_png16(const std::string& path, const Slice& img, double lo, double hi);

/// Raw values, one CSV line per y row, printed with enough digits to
/// round-trip binary32 exactly.
void write_slice_csv(const std::string& path, const Slice& img);

/// Nearest-voxel samples along the pixel segment (x0,y0)-(x1,y1):
/// CSV rows (step, x, y, value).
void write_profile_csv(const std::string& path, const Slice& img, int x0, int y0,
                       int x1, int y1);

}  // namespace decaf
