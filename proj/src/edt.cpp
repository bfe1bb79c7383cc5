#include "nucseg/edt.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace nucseg {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One line of the lower envelope transform. `f` holds squared distances
// accumulated so far (inf for "no site"), `w` the spacing along this line.
void envelope_1d(std::vector<double>& f, double w, std::vector<double>& out, std::vector<Index>& hull,
                 std::vector<double>& bounds) {
  const Index n = static_cast<Index>(f.size());
  const double w2 = w * w;
  hull.clear();
  bounds.clear();
  for (Index q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    const double fq = f[q] + w2 * static_cast<double>(q) * static_cast<double>(q);
    while (!hull.empty()) {
      const Index v = hull.back();
      const double fv = f[v] + w2 * static_cast<double>(v) * static_cast<double>(v);
      const double s = (fq - fv) / (2.0 * w2 * static_cast<double>(q - v));
      if (s <= bounds.back()) {
        hull.pop_back();
        bounds.pop_back();
      } else {
        bounds.push_back(s);
        break;
      }
    }
    if (hull.empty()) bounds.push_back(-kInf);
    hull.push_back(q);
  }
  out.assign(static_cast<std::size_t>(n), kInf);
  if (hull.empty()) return;
  // bounds[k] is where parabola hull[k] starts to dominate.
  std::size_t k = 0;
  for (Index q = 0; q < n; ++q) {
    while (k + 1 < hull.size() && bounds[k + 1] < static_cast<double>(q)) ++k;
    const double d = w * static_cast<double>(q - hull[k]);
    out[q] = d * d + f[hull[k]];
  }
}

}  // namespace

Volume squared_distance_transform(const Mask& sites, bool anisotropic) {
  if (sites.channels() != 1) throw Error(ErrorCode::kWrongChannelCount, "sites must be single-channel");
  const Shape& s = sites.shape();
  const VoxelSize& vs = sites.voxel_size();
  const double spacing[3] = {anisotropic ? vs.dz : 1.0, anisotropic ? vs.dy : 1.0, anisotropic ? vs.dx : 1.0};

  Volume dist(s, 1, vs);
  for (Index v = 0; v < s.voxels(); ++v) dist.at(0, v) = sites.at(0, v) != 0 ? 0.0 : kInf;

  std::vector<double> line, out, bounds;
  std::vector<Index> hull;
  for (int axis = 0; axis < 3; ++axis) {
    const Index n = s[axis];
    const Index stride = axis == 0 ? s.ny * s.nx : (axis == 1 ? s.nx : 1);
    line.resize(static_cast<std::size_t>(n));
    for (Index base = 0; base < s.voxels(); ++base) {
      // Visit each line once: start voxels have coordinate 0 along `axis`.
      const Coord3 c = s.coord(base);
      if (c[axis] != 0) continue;
      for (Index i = 0; i < n; ++i) line[i] = dist.at(0, base + i * stride);
      envelope_1d(line, spacing[axis], out, hull, bounds);
      for (Index i = 0; i < n; ++i) dist.at(0, base + i * stride) = out[i];
    }
  }
  return dist;
}

}  // namespace nucseg
