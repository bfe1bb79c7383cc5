#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "nucseg/detection.hpp"
#include "nucseg/volume.hpp"

namespace nucseg {

/// One overlapping (gt, pred) pair.
struct IouEntry {
  std::int32_t gt_id = 0;
  std::int32_t pred_id = 0;
  std::int64_t intersection = 0;
  std::int64_t union_size = 0;

  double iou() const { return static_cast<double>(intersection) / static_cast<double>(union_size); }
};

/// Overlapping pairs only, ordered by (gt_id, pred_id).
std::vector<IouEntry> iou_matrix(const LabelVolume& gt, const LabelVolume& pred);

/// TP / FP / FN counts and the resulting AP = TP / (TP + FP + FN), 1 when all are zero.
struct ApCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;

  double ap() const {
    const std::int64_t denom = tp + fp + fn;
    return denom == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(denom);
  }
  bool operator==(const ApCounts&) const = default;
};

/// Greedy one-to-one matching by descending IoU among pairs with IoU strictly above
/// the threshold; ties go to the smaller gt ID, then the smaller pred ID.
ApCounts segmentation_ap(const LabelVolume& gt, const LabelVolume& pred, double iou_threshold);

/// Same matching on a precomputed IoU matrix.
ApCounts match_instances(const std::vector<IouEntry>& pairs, std::int64_t n_gt, std::int64_t n_pred,
                         double iou_threshold);

/// A detection hits the instance containing its rounded position. Each instance's best
/// hit (highest score, then raster-first position, then list order) is a TP, every other
/// detection an FP, instances without hits are FN.
ApCounts detection_ap(const LabelVolume& gt, const DetectionList& dets);

/// IoU thresholds 0.1, 0.2, ..., 0.9.
std::array<double, 9> iou_thresholds();

struct SegmentationScores {
  std::array<double, 9> ap{};
  std::array<ApCounts, 9> counts{};
  double av_ap = 0.0;

  double ap_at(double threshold) const;
};

struct EvalReport {
  std::optional<SegmentationScores> segmentation;
  std::optional<double> detection_ap;
  std::optional<ApCounts> detection_counts;
};

EvalReport evaluate(const LabelVolume& gt, const LabelVolume* seg, const DetectionList* dets);

/// Field-wise mean of APs and avAP, summed counts. Every report must carry the same
/// set of sections. Throws kEmptyList on empty input.
EvalReport aggregate_reports(const std::vector<EvalReport>& reports);

}  // namespace nucseg
