#pragma once

#include <string>

#include "decaf/volume.hpp"

namespace decaf {

/// Volume container, magic "DCAF". Layout after the magic:
///   u16 version (1), u32 nx/ny/nz, f64 dx/dy/dz (um), f64 z0,
///   u8 flag (0 = real-only, 1 = complex-pair),
/// then little-endian f32 samples: all re slices in z order, then all im
/// slices when the flag says so. Within a slice ix varies fastest. Samples
/// are f32 on disk and widen to f64 in memory, so a write/read round trip
/// is lossless exactly when the data already sits on f32 values.
void write_dcaf(const std::string& path, const PermittivityVolume& v);
PermittivityVolume read_dcaf(const std::string& path);

}  // namespace decaf
