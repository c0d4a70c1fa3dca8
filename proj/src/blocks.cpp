#include "decaf/blocks.hpp"

#include <cmath>

#include "decaf/errors.hpp"

namespace decaf {

namespace {

// Largest divisor of n not exceeding sqrt(n).
int near_square_divisor(int n) {
  int best = 1;
  for (int d = 1; static_cast<long>(d) * d <= n; ++d)
    if (n % d == 0) best = d;
  return best;
}

std::vector<int> tile_edges(int extent, int tiles) {
  std::vector<int> edges(tiles + 1);
  for (int t = 0; t <= tiles; ++t)
    edges[t] = static_cast<int>(static_cast<long>(t) * extent / tiles);
  return edges;
}

// Per-axis feather weight at index t for a core spanning [c0, c1) of an axis
// of length n with padding p. Ramps rise/fall across the 2p-wide strip shared
// with a neighbouring block; grid borders have no neighbour and stay at 1.
double axis_weight(int t, int c0, int c1, int n, int p) {
  double w = 1.0;
  if (c0 > 0 && t < c0 + p) {
    const int k = t - (c0 - p);
    w *= static_cast<double>(k + 1) / (2 * p + 1);
  }
  if (c1 < n && t >= c1 - p) {
    const int k = t - (c1 - p);
    w *= static_cast<double>(2 * p - k) / (2 * p + 1);
  }
  return w;
}

}  // namespace

BlockPartition partition_blocks(const Grid3D& g, int count, int padding,
                                int margin, bool full_view) {
  if (count < 1) throw ConfigError("block count must be positive");
  if (padding < 0 || margin < 0) throw ConfigError("padding and margin must be nonnegative");

  int small = near_square_divisor(count);
  int large = count / small;
  const int tx = g.nx >= g.ny ? large : small;
  const int ty = count / tx;
  if (tx > g.nx || ty > g.ny)
    throw ConfigError("more blocks than lateral voxels");

  const auto ex = tile_edges(g.nx, tx);
  const auto ey = tile_edges(g.ny, ty);

  BlockPartition part;
  part.nx = g.nx;
  part.ny = g.ny;
  part.padding = padding;
  part.margin = margin;
  part.full_view = full_view;

  for (int jy = 0; jy < ty; ++jy) {
    for (int jx = 0; jx < tx; ++jx) {
      Block b;
      b.core = {ex[jx], ey[jy], ex[jx + 1] - ex[jx], ey[jy + 1] - ey[jy]};
      if (count > 1 && 2 * padding > std::min(b.core.w, b.core.h))
        throw ConfigError("padding exceeds half the block size");
      const int px0 = std::max(0, b.core.x0 - padding);
      const int py0 = std::max(0, b.core.y0 - padding);
      b.padded = {px0, py0, std::min(g.nx, b.core.x1() + padding) - px0,
                  std::min(g.ny, b.core.y1() + padding) - py0};
      if (full_view) {
        b.view = {0, 0, g.nx, g.ny};
      } else {
        const int vx0 = std::max(0, b.padded.x0 - margin);
        const int vy0 = std::max(0, b.padded.y0 - margin);
        b.view = {vx0, vy0, std::min(g.nx, b.padded.x1() + margin) - vx0,
                  std::min(g.ny, b.padded.y1() + margin) - vy0};
      }
      b.feather = Slice::Ones(b.padded.w, b.padded.h);
      if (count > 1 && padding > 0) {
        for (int j = 0; j < b.padded.h; ++j) {
          const double wy = axis_weight(b.padded.y0 + j, b.core.y0, b.core.y1(), g.ny, padding);
          for (int i = 0; i < b.padded.w; ++i) {
            const double wx = axis_weight(b.padded.x0 + i, b.core.x0, b.core.x1(), g.nx, padding);
            b.feather(i, j) = wx * wy;
          }
        }
      }
      part.blocks.push_back(std::move(b));
    }
  }
  return part;
}

Slice crop(const Slice& s, const Rect& r) {
  return s.block(r.x0, r.y0, r.w, r.h);
}

MeasurementSet crop(const MeasurementSet& m, const Rect& r) {
  MeasurementSet out;
  out.nx = r.w;
  out.ny = r.h;
  out.images.reserve(m.images.size());
  for (const auto& img : m.images) out.images.push_back(crop(img, r));
  return out;
}

void embed_add(Slice& full, const Rect& r, const Slice& sub) {
  full.block(r.x0, r.y0, r.w, r.h) += sub;
}

void embed_add(MeasurementSet& full, const Rect& r, const MeasurementSet& sub) {
  if (full.count() != sub.count()) throw ConfigError("measurement counts differ in embed");
  for (size_t p = 0; p < full.images.size(); ++p)
    embed_add(full.images[p], r, sub.images[p]);
}

void add_weighted_block(PermittivityVolume& out, const Rect& out_rect,
                        const PermittivityVolume& block_vol, const Slice& feather,
                        const Rect& src) {
  if (!out_rect.contains(src)) throw ConfigError("block rect escapes the target extent");
  const int ox = src.x0 - out_rect.x0;
  const int oy = src.y0 - out_rect.y0;
  for (int q = 0; q < block_vol.grid.nz; ++q) {
    out.re[q].block(ox, oy, src.w, src.h) += feather.cwiseProduct(block_vol.re[q]);
    if (out.complex_pair() && block_vol.complex_pair())
      out.im[q].block(ox, oy, src.w, src.h) += feather.cwiseProduct(block_vol.im[q]);
  }
}

PermittivityVolume assemble_volume(const Grid3D& g, const BlockPartition& part,
                                   const std::vector<PermittivityVolume>& block_vols) {
  if (block_vols.size() != part.blocks.size())
    throw ConfigError("block volume count does not match the partition");
  PermittivityVolume out = PermittivityVolume::zeros(g, true);
  const Rect whole{0, 0, g.nx, g.ny};
  for (size_t i = 0; i < part.blocks.size(); ++i)
    add_weighted_block(out, whole, block_vols[i], part.blocks[i].feather,
                       part.blocks[i].padded);
  return out;
}

}  // namespace decaf
