#pragma once

#include "nucseg/targets.hpp"
#include "nucseg/volume.hpp"

namespace nucseg {

enum class SeedSource { kMain, kCpv };

std::string_view to_string(SeedSource s);
SeedSource parse_seed_source(std::string_view name);

/// One post-processing setting. Defaults are the sdt model-I row.
struct PostprocConfig {
  Variant variant = Variant::kSdt;
  SeedSource seed_source = SeedSource::kMain;
  double seed_threshold = -0.14;
  double foreground_threshold = 0.0;
  double cpv_seed_threshold = 70.0;  ///< minimum vote count
  bool dilate_result = true;
  /// Inputs are logits: softmax (3-label) or sigmoid (affinities) is applied first.
  bool logits = false;

  bool operator==(const PostprocConfig&) const = default;
};

/// Model-I segmentation-validated row of the hyper-parameter tables for a variant:
/// sdt (-0.14, 0.0, dilated), 3-label (0.7, 0.95), affinities (0.99, 0.99, dilated).
PostprocConfig default_postproc(Variant variant);

/// Throws kInvalidArgument on non-finite thresholds, negative vote threshold or the gauss variant.
void validate(const PostprocConfig& cfg);

/// Flooding priority (low floods first) plus the region the flood may claim.
struct TopographicMap {
  Volume height;
  Mask foreground;
};

/// `pred` carries the variant's prediction channels, optionally followed by 3 cpv channels.
TopographicMap build_topography(const Volume& pred, const PostprocConfig& cfg);

/// Seed regions from the main prediction channels, 6-connected.
LabelVolume extract_seeds_main(const Volume& pred, const PostprocConfig& cfg);

/// Seed regions from center-point-vector votes: every foreground voxel p votes for
/// round(p + v(p)); voxels with at least `threshold` votes become seeds.
LabelVolume extract_seeds_cpv(const Volume& cpv_pred, const Mask& fg_mask, double threshold);

/// Vote counter behind extract_seeds_cpv.
Volume cpv_votes(const Volume& cpv_pred, const Mask& fg_mask);

/// Seeded priority flood over face neighbours inside the foreground. Seeds are clipped
/// to the foreground first. Ties in height are resolved first-in first-out.
LabelVolume watershed(const TopographicMap& map, const LabelVolume& seeds);

/// Full pipeline: topography, seeds, watershed, optional single dilation.
LabelVolume segment(const Volume& pred, const PostprocConfig& cfg);

}  // namespace nucseg
