#pragma once

#include <functional>
#include <optional>

#include "nucseg/targets.hpp"
#include "nucseg/volume.hpp"

namespace nucseg {

/// Loss value and its gradient with respect to the prediction.
struct LossResult {
  double value = 0.0;
  Volume gradient;
};

/// Sum of squared differences over all channels; a single-channel `mask`
/// restricts the sum to voxels where it is nonzero.
LossResult ssd_loss(const Volume& pred, const Volume& target, const std::optional<Volume>& mask = std::nullopt);

/// Softmax cross entropy over 3 logit channels against class indices {0, 1, 2}, summed over voxels.
LossResult softmax_ce_loss(const Volume& logits, const Volume& target);

/// Per-channel sigmoid binary cross entropy on logits, summed.
LossResult sigmoid_bce_loss(const Volume& logits, const Volume& target);

/// main_weight * main + ssd(cpv_pred, cpv_target, fg_mask). The gradient stacks
/// the scaled main gradient channels over the cpv gradient channels.
LossResult combined_loss(const std::function<LossResult()>& main, const Volume& cpv_pred, const Volume& cpv_target,
                         const Volume& fg_mask, double main_weight);

/// Weight of the main loss when trained together with center point vectors:
/// 100 for sdt, 1 otherwise.
double main_loss_weight(Variant variant);

/// Main-task loss of a variant: ssd for sdt and gauss, softmax CE for 3-label,
/// sigmoid BCE for affinities. `pred` holds only the main channels.
LossResult main_loss(Variant variant, const Volume& pred, const Volume& target);

/// Loss of a full prediction against an encoded bundle. With cpv channels the
/// auxiliary term is masked to the ground-truth foreground of `labels`.
LossResult bundle_loss(Variant variant, const Volume& pred, const Volume& bundle, const LabelVolume& labels);

}  // namespace nucseg
