#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nucseg/detection.hpp"
#include "nucseg/metrics.hpp"
#include "nucseg/postproc.hpp"

namespace nucseg {

enum class Objective { kSegmentationAvAp, kSegmentationAp, kDetectionAp };

std::string_view to_string(Objective o);
Objective parse_objective(std::string_view name);

/// Grids over post-processing parameters. Segmentation variants enumerate
/// seed_source x seed_threshold x cpv_seed_threshold x foreground_threshold x dilate
/// (last varies fastest); gauss enumerates gauss_threshold x nms_distance.
struct SweepGrid {
  Variant variant = Variant::kSdt;
  bool logits = false;
  std::vector<SeedSource> seed_source{SeedSource::kMain};
  std::vector<double> seed_threshold;
  std::vector<double> foreground_threshold;
  std::vector<double> cpv_seed_threshold;
  std::vector<bool> dilate;
  std::vector<double> gauss_threshold;
  std::vector<int> nms_distance;
  Objective objective = Objective::kSegmentationAvAp;
  double objective_iou = 0.5;  ///< used by kSegmentationAp
};

/// One alternative set of predictions, aligned with the validation ground truth.
struct SweepCheckpoint {
  std::string name;
  std::vector<std::filesystem::path> predictions;
};

struct SweepSpec {
  SweepGrid grid;
  std::vector<std::filesystem::path> ground_truth;
  std::vector<SweepCheckpoint> checkpoints;
};

struct SweepPoint {
  PostprocConfig postproc;
  NmsConfig nms;
};

struct SweepRow {
  std::size_t checkpoint = 0;
  std::string checkpoint_name;
  SweepPoint point;
  double objective = 0.0;
  EvalReport report;  ///< aggregated over the validation set
};

struct SweepResult {
  Variant variant = Variant::kSdt;
  Objective objective = Objective::kSegmentationAvAp;
  double objective_iou = 0.5;
  std::vector<SweepRow> table;  ///< enumeration order
  std::size_t selected = 0;
};

/// Grid points in enumeration order. Throws kEmptyGrid if any grid the variant uses is empty.
std::vector<SweepPoint> enumerate_grid(const SweepGrid& grid);

/// Scores every (checkpoint, grid point) on the validation set and selects the first maximum
/// of the objective. `predictions[k][i]` is checkpoint k's prediction for `ground_truth[i]`.
/// Rows are evaluated on up to `threads` workers; results do not depend on the count.
SweepResult run_sweep(const SweepGrid& grid, const std::vector<LabelVolume>& ground_truth,
                      const std::vector<std::vector<Volume>>& predictions,
                      const std::vector<std::string>& checkpoint_names, unsigned threads = 1);

/// Loads the files named by `spec` and runs the sweep.
SweepResult run_sweep(const SweepSpec& spec, unsigned threads = 1);

}  // namespace nucseg
