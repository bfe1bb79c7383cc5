#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "nucseg/volume.hpp"

namespace fixture {

using namespace nucseg;

inline LabelVolume labels(Index nz, Index ny, Index nx) { return LabelVolume(Shape{nz, ny, nx}); }

/// Paints a solid box [z0, z1) x [y0, y1) x [x0, x1) with `id`.
inline void box(LabelVolume& l, Index z0, Index z1, Index y0, Index y1, Index x0, Index x1, std::int32_t id) {
  for (Index z = z0; z < z1; ++z)
    for (Index y = y0; y < y1; ++y)
      for (Index x = x0; x < x1; ++x) l(z, y, x) = id;
}

/// Paints voxels whose distance to `center` is at most `radius`.
inline void sphere(LabelVolume& l, const Point3& center, double radius, std::int32_t id) {
  const Shape& s = l.shape();
  for (Index z = 0; z < s.nz; ++z)
    for (Index y = 0; y < s.ny; ++y)
      for (Index x = 0; x < s.nx; ++x) {
        const Point3 p(static_cast<double>(z), static_cast<double>(y), static_cast<double>(x));
        if ((p - center).norm() <= radius) l(z, y, x) = id;
      }
}

/// Random labels: each voxel is background with probability 1 - fill, else one of `ids`.
inline LabelVolume random_labels(std::mt19937_64& rng, Shape shape, int ids, double fill) {
  LabelVolume l(shape);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> pick(1, ids);
  for (Index v = 0; v < l.voxels(); ++v) {
    if (u(rng) < fill) l.at(0, v) = pick(rng);
  }
  return l;
}

inline Volume random_volume(std::mt19937_64& rng, Shape shape, Index channels, double lo, double hi) {
  Volume v(shape, channels);
  std::uniform_real_distribution<double> u(lo, hi);
  for (Index i = 0; i < v.size(); ++i) v.data()[i] = u(rng);
  return v;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("nucseg_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fixture
