#pragma once

#include "nucseg/volume.hpp"

namespace nucseg {

/// Exact squared Euclidean distance from every voxel to the nearest nonzero voxel of `sites`.
///
/// Separable lower-envelope-of-parabolas scheme, one pass per axis. With
/// `anisotropic` the axis spacings come from the mask's voxel size, otherwise
/// every axis has unit spacing. Voxels with no reachable site get +inf.
Volume squared_distance_transform(const Mask& sites, bool anisotropic = false);

}  // namespace nucseg
