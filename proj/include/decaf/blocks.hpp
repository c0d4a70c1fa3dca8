#pragma once

#include <vector>

#include "decaf/forward.hpp"
#include "decaf/grid.hpp"
#include "decaf/volume.hpp"

namespace decaf {

// Half-open lateral index rectangle [x0, x0+w) x [y0, y0+h).
struct Rect {
  int x0 = 0, y0 = 0, w = 0, h = 0;
  int x1() const { return x0 + w; }
  int y1() const { return y0 + h; }
  bool contains(const Rect& r) const {
    return r.x0 >= x0 && r.y0 >= y0 && r.x1() <= x1() && r.y1() <= y1();
  }
};

struct Block {
  Rect core;    // exclusive tile; cores partition the lateral grid
  Rect padded;  // core grown by the padding apron, clipped to the grid
  Rect view;    // padded grown by the enlargement margin (or the full grid)
  // Partition-of-unity weights on the padded rect: linear ramps across the
  // 2p-wide strip shared with each neighbour, 1 elsewhere; a lone block is
  // weighted exactly 1 everywhere.
  Slice feather;
};

struct BlockPartition {
  int nx = 0, ny = 0;
  int padding = 0, margin = 0;
  bool full_view = false;
  std::vector<Block> blocks;
  int count() const { return static_cast<int>(blocks.size()); }
};

// Splits the lateral grid into `count` near-equal rectangles (factored as
// close to square as count allows, the larger factor on the larger axis).
// full_view makes every view the whole lateral grid regardless of margin.
BlockPartition partition_blocks(const Grid3D& g, int count, int padding,
                                int margin, bool full_view = false);

Slice crop(const Slice& s, const Rect& r);
MeasurementSet crop(const MeasurementSet& m, const Rect& r);
void embed_add(Slice& full, const Rect& r, const Slice& sub);
void embed_add(MeasurementSet& full, const Rect& r, const MeasurementSet& sub);

// Accumulates feather-weighted block slices into `out` (whose lateral extent
// is out_rect): out[src - out_rect.origin] += feather .* block for every
// z-slice of every channel present in both volumes.
void add_weighted_block(PermittivityVolume& out, const Rect& out_rect,
                        const PermittivityVolume& block_vol, const Slice& feather,
                        const Rect& src);

// Sums all feather-weighted block volumes onto the full grid.
PermittivityVolume assemble_volume(const Grid3D& g, const BlockPartition& part,
                                   const std::vector<PermittivityVolume>& block_vols);

}  // namespace decaf
