#include "nucseg/morphology.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <string>

namespace nucseg {

std::map<std::int32_t, InstanceMoments> instance_moments(const LabelVolume& labels) {
  std::map<std::int32_t, InstanceMoments> moments;
  const Shape& s = labels.shape();
  for (Index z = 0; z < s.nz; ++z) {
    for (Index y = 0; y < s.ny; ++y) {
      for (Index x = 0; x < s.nx; ++x) {
        const std::int32_t id = labels(z, y, x);
        if (id <= 0) continue;
        InstanceMoments& m = moments[id];
        ++m.count;
        m.sum += Point3(static_cast<double>(z), static_cast<double>(y), static_cast<double>(x));
      }
    }
  }
  return moments;
}

std::vector<std::int32_t> instance_ids(const LabelVolume& labels) {
  std::vector<std::int32_t> ids;
  for (Index v = 0; v < labels.voxels(); ++v) {
    if (labels.at(0, v) > 0) ids.push_back(labels.at(0, v));
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

Point3 center_of_mass(const LabelVolume& labels, std::int32_t id) {
  InstanceMoments m;
  const Shape& s = labels.shape();
  for (Index z = 0; z < s.nz; ++z) {
    for (Index y = 0; y < s.ny; ++y) {
      for (Index x = 0; x < s.nx; ++x) {
        if (labels(z, y, x) != id) continue;
        ++m.count;
        m.sum += Point3(static_cast<double>(z), static_cast<double>(y), static_cast<double>(x));
      }
    }
  }
  if (id <= 0 || m.count == 0) {
    throw Error(ErrorCode::kUnknownId, "instance " + std::to_string(id) + " not present");
  }
  return m.center();
}

LabelVolume erode_instances(const LabelVolume& labels, int iterations) {
  if (iterations < 0) throw Error(ErrorCode::kInvalidArgument, "iterations must be >= 0");
  LabelVolume current = labels;
  const Shape& s = labels.shape();
  for (int it = 0; it < iterations; ++it) {
    LabelVolume next = current;
    for (Index z = 0; z < s.nz; ++z) {
      for (Index y = 0; y < s.ny; ++y) {
        for (Index x = 0; x < s.nx; ++x) {
          const std::int32_t id = current(z, y, x);
          if (id <= 0) continue;
          for (const auto& o : kFaceOffsets) {
            const Index nz = z + o[0], ny = y + o[1], nx = x + o[2];
            if (!s.contains(nz, ny, nx) || current(nz, ny, nx) != id) {
              next(z, y, x) = 0;
              break;
            }
          }
        }
      }
    }
    current = std::move(next);
  }
  return current;
}

LabelVolume dilate_instances(const LabelVolume& labels, int iterations) {
  if (iterations < 0) throw Error(ErrorCode::kInvalidArgument, "iterations must be >= 0");
  LabelVolume current = labels;
  const Shape& s = labels.shape();
  for (int it = 0; it < iterations; ++it) {
    LabelVolume next = current;
    for (Index z = 0; z < s.nz; ++z) {
      for (Index y = 0; y < s.ny; ++y) {
        for (Index x = 0; x < s.nx; ++x) {
          if (current(z, y, x) > 0) continue;
          std::int32_t best = std::numeric_limits<std::int32_t>::max();
          for (const auto& o : kFaceOffsets) {
            const Index nz = z + o[0], ny = y + o[1], nx = x + o[2];
            if (!s.contains(nz, ny, nx)) continue;
            const std::int32_t id = current(nz, ny, nx);
            if (id > 0) best = std::min(best, id);
          }
          if (best != std::numeric_limits<std::int32_t>::max()) next(z, y, x) = best;
        }
      }
    }
    current = std::move(next);
  }
  return current;
}

LabelVolume connected_components(const Mask& mask, Connectivity connectivity) {
  if (mask.channels() != 1) throw Error(ErrorCode::kWrongChannelCount, "mask must be single-channel");
  const Shape& s = mask.shape();
  LabelVolume out(s, 1, mask.voxel_size());

  std::vector<std::array<int, 3>> offsets;
  for (int dz = -1; dz <= 1; ++dz) {
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int manhattan = std::abs(dz) + std::abs(dy) + std::abs(dx);
        if (manhattan == 0) continue;
        if (connectivity == Connectivity::kFace && manhattan != 1) continue;
        offsets.push_back({dz, dy, dx});
      }
    }
  }

  std::int32_t next_id = 0;
  std::deque<Index> queue;
  for (Index v = 0; v < mask.voxels(); ++v) {
    if (mask.at(0, v) == 0 || out.at(0, v) != 0) continue;
    ++next_id;
    out.at(0, v) = next_id;
    queue.push_back(v);
    while (!queue.empty()) {
      const Coord3 c = s.coord(queue.front());
      queue.pop_front();
      for (const auto& o : offsets) {
        const Coord3 n(c[0] + o[0], c[1] + o[1], c[2] + o[2]);
        if (!s.contains(n)) continue;
        const Index nv = s.linear(n);
        if (mask.at(0, nv) == 0 || out.at(0, nv) != 0) continue;
        out.at(0, nv) = next_id;
        queue.push_back(nv);
      }
    }
  }
  return out;
}

LabelVolume connected_components(const Volume& mask, Connectivity connectivity) {
  if (mask.channels() != 1) throw Error(ErrorCode::kWrongChannelCount, "mask must be single-channel");
  if (!((mask.data() == 0.0) || (mask.data() == 1.0)).all()) {
    throw Error(ErrorCode::kInvalidArgument, "mask values must be 0 or 1");
  }
  return connected_components(cast_volume<std::uint8_t>(mask), connectivity);
}

Mask foreground_mask(const LabelVolume& labels) {
  Mask m(labels.shape(), 1, labels.voxel_size());
  m.data() = (labels.channel(0) > 0).cast<std::uint8_t>();
  return m;
}

}  // namespace nucseg
