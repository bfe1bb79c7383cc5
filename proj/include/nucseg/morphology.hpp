#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "nucseg/volume.hpp"

namespace nucseg {

enum class Connectivity { kFace = 6, kFull = 26 };

/// Voxel count and coordinate sum of one instance.
struct InstanceMoments {
  Index count = 0;
  Point3 sum = Point3::Zero();

  Point3 center() const { return sum / static_cast<double>(count); }
};

/// Moments of every positive ID, ordered by ID.
std::map<std::int32_t, InstanceMoments> instance_moments(const LabelVolume& labels);

/// Sorted list of the positive IDs present.
std::vector<std::int32_t> instance_ids(const LabelVolume& labels);

/// Unweighted mean of the voxel coordinates carrying `id`. Throws kUnknownId.
Point3 center_of_mass(const LabelVolume& labels, std::int32_t id);

/// Per-instance erosion with the face-adjacent structuring element.
/// Out-of-bounds neighbours count as background.
LabelVolume erode_instances(const LabelVolume& labels, int iterations);

/// Per-instance dilation with the face-adjacent structuring element. A background voxel
/// reached by several instances in the same iteration goes to the smallest ID.
LabelVolume dilate_instances(const LabelVolume& labels, int iterations);

/// Labels maximal connected foreground regions of a binary mask with IDs 1, 2, ...
/// in raster order of each region's first voxel.
LabelVolume connected_components(const Mask& mask, Connectivity connectivity = Connectivity::kFace);

/// Same as above for a single-channel real volume whose values are all 0 or 1.
LabelVolume connected_components(const Volume& mask, Connectivity connectivity = Connectivity::kFace);

/// 1 where labels > 0.
Mask foreground_mask(const LabelVolume& labels);

}  // namespace nucseg
