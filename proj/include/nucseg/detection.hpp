#pragma once

#include <vector>

#include "nucseg/volume.hpp"

namespace nucseg {

struct Detection {
  Point3 position = Point3::Zero();  ///< (z, y, x) in voxel units
  double score = 0.0;
};

using DetectionList = std::vector<Detection>;

/// Gaussian-blob peak extraction parameters.
struct NmsConfig {
  double gauss_threshold = 0.25;
  int nms_distance = 3;  ///< Chebyshev window radius in voxels
};

/// Peak extraction by non-maximum suppression in a cube window.
///
/// A voxel is kept when its value reaches `gauss_threshold`, no voxel in its
/// window exceeds it, and no voxel earlier in raster order inside the window ties it.
/// Results are ordered by descending score, raster order among equal scores.
DetectionList nms_detect(const Volume& pred, const NmsConfig& cfg);

/// One detection per instance at its center of mass, scored by voxel count.
/// Ordered by descending score, then ascending ID. Centroids are not snapped
/// into the instance, so a non-convex shape may yield a point outside it.
DetectionList centroids_from_labels(const LabelVolume& seg);

/// Stable sort by descending score.
void sort_by_score(DetectionList& dets);

}  // namespace nucseg
