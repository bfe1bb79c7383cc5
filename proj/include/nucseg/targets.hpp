#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "nucseg/volume.hpp"

namespace nucseg {

/// Main-task model variants.
enum class Variant { kSdt, kThreeLabel, kAffinities, kGauss };

std::string_view to_string(Variant v);
/// Accepts "sdt", "3label", "affinities", "gauss". Throws kInvalidArgument.
Variant parse_variant(std::string_view name);

/// Channels of the main target of a variant (3-label targets are one class-index channel).
Index target_channels(Variant v);
/// Channels of a prediction for a variant (3-label predictions carry one probability per class).
Index prediction_channels(Variant v);

inline constexpr Index kCpvChannels = 3;

// Three-label classes.
inline constexpr int kBackground = 0;
inline constexpr int kInterior = 1;
inline constexpr int kBoundary = 2;

inline bool is_three_label_class(double c) { return c == kBackground || c == kInterior || c == kBoundary; }

struct TargetParams {
  double tanh_scale = 5.0;  ///< SDT distances are divided by this before tanh
  double gauss_sigma = 2.0;  ///< voxel units
  bool anisotropic_edt = false;
};

/// Foreground voxels with a face neighbour that is background, outside the
/// volume, or a different instance.
Mask boundary_voxels(const LabelVolume& labels);

/// Unsigned distance (voxel units, or physical with `anisotropic`) to the nearest
/// boundary voxel; +inf everywhere when there is no foreground.
Volume boundary_distance(const LabelVolume& labels, bool anisotropic = false);

/// tanh(signed distance / scale), negative inside instances, 0 on boundary voxels,
/// positive in background. All-background input yields +1 everywhere.
Volume encode_sdt(const LabelVolume& labels, double scale = 5.0, bool anisotropic = false);

/// Class index per voxel: 0 background, 1 interior, 2 boundary.
Volume encode_three_label(const LabelVolume& labels);

/// Channels: affinity to the +z, +y, +x neighbour, then the foreground mask,
/// all computed after eroding every instance once.
Volume encode_affinities(const LabelVolume& labels);

/// Per foreground voxel, the vector (vz, vy, vx) to its instance's center of mass.
Volume encode_cpv(const LabelVolume& labels);

/// Max over instance centers of exp(-|p - c|^2 / (2 sigma^2)).
Volume encode_gauss(const LabelVolume& labels, double sigma = 2.0);

/// Main-variant channels followed, with `with_cpv`, by (vz, vy, vx).
Volume encode_bundle(const LabelVolume& labels, Variant variant, bool with_cpv, const TargetParams& params = {});

/// Expands a 3-label class-index channel into (P(bg), P(interior), P(boundary)).
Volume one_hot_three_label(const Volume& classes);

/// Turns an encoded bundle into a prediction-shaped volume: identical except that
/// a 3-label class channel is replaced by its one-hot expansion.
Volume bundle_as_prediction(const Volume& bundle, Variant variant);

}  // namespace nucseg
