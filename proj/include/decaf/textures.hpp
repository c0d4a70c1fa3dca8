#pragma once

#include <cstdint>
#include <vector>

#include "decaf/volume.hpp"

namespace decaf {

/// Procedural training textures: multi-octave smoothed value noise,
/// min-max normalized to [0, 1] per image. Deterministic in (seed, index).
std::vector<Slice> make_texture_dataset(int count, int size, std::uint64_t seed);

/// Adds i.i.d. zero-mean Gaussian noise of the given std to a copy.
Slice add_gaussian_noise(const Slice& img, double sigma, std::uint64_t seed);

}  // namespace decaf
