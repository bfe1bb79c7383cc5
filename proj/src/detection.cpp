#include "nucseg/detection.hpp"

#include <algorithm>

#include "nucseg/morphology.hpp"

namespace nucseg {

void sort_by_score(DetectionList& dets) {
  std::stable_sort(dets.begin(), dets.end(),
                   [](const Detection& a, const Detection& b) { return a.score > b.score; });
}

DetectionList nms_detect(const Volume& pred, const NmsConfig& cfg) {
  if (pred.channels() != 1) throw Error(ErrorCode::kWrongChannelCount, "nms_detect expects one channel");
  if (cfg.nms_distance < 1) throw Error(ErrorCode::kInvalidArgument, "nms_distance must be >= 1");
  const Shape& s = pred.shape();
  const Index r = cfg.nms_distance;
  DetectionList dets;
  for (Index z = 0; z < s.nz; ++z) {
    for (Index y = 0; y < s.ny; ++y) {
      for (Index x = 0; x < s.nx; ++x) {
        const double value = pred(z, y, x);
        if (!(value >= cfg.gauss_threshold)) continue;
        const Index self = s.linear(z, y, x);
        bool keep = true;
        for (Index qz = std::max<Index>(0, z - r); keep && qz <= std::min(s.nz - 1, z + r); ++qz) {
          for (Index qy = std::max<Index>(0, y - r); keep && qy <= std::min(s.ny - 1, y + r); ++qy) {
            for (Index qx = std::max<Index>(0, x - r); qx <= std::min(s.nx - 1, x + r); ++qx) {
              const double other = pred(qz, qy, qx);
              if (other > value || (other == value && s.linear(qz, qy, qx) < self)) {
                keep = false;
                break;
              }
            }
          }
        }
        if (keep) {
          dets.push_back({Point3(static_cast<double>(z), static_cast<double>(y), static_cast<double>(x)), value});
        }
      }
    }
  }
  sort_by_score(dets);
  return dets;
}

DetectionList centroids_from_labels(const LabelVolume& seg) {
  DetectionList dets;
  for (const auto& [id, m] : instance_moments(seg)) {
    dets.push_back({m.center(), static_cast<double>(m.count)});
  }
  sort_by_score(dets);
  return dets;
}

}  // namespace nucseg
