#include "nucseg/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "nucseg/io.hpp"

namespace nucseg {
namespace {

double objective_value(const SweepGrid& grid, const EvalReport& report) {
  switch (grid.objective) {
    case Objective::kSegmentationAvAp: return report.segmentation->av_ap;
    case Objective::kSegmentationAp: return report.segmentation->ap_at(grid.objective_iou);
    case Objective::kDetectionAp: return *report.detection_ap;
  }
  return 0.0;
}

EvalReport score_one(const SweepGrid& grid, const SweepPoint& point, const LabelVolume& gt, const Volume& pred) {
  if (grid.variant == Variant::kGauss) {
    if (pred.channels() != 1) throw Error(ErrorCode::kWrongChannelCount, "gauss predictions are single-channel");
    const DetectionList dets = nms_detect(pred, point.nms);
    return evaluate(gt, nullptr, &dets);
  }
  const LabelVolume seg = segment(pred, point.postproc);
  if (grid.objective == Objective::kDetectionAp) {
    const DetectionList dets = centroids_from_labels(seg);
    return evaluate(gt, &seg, &dets);
  }
  return evaluate(gt, &seg, nullptr);
}

}  // namespace

std::string_view to_string(Objective o) {
  switch (o) {
    case Objective::kSegmentationAvAp: return "seg_avap";
    case Objective::kSegmentationAp: return "seg_ap";
    case Objective::kDetectionAp: return "det_ap";
  }
  return "?";
}

Objective parse_objective(std::string_view name) {
  if (name == "seg_avap") return Objective::kSegmentationAvAp;
  if (name == "seg_ap") return Objective::kSegmentationAp;
  if (name == "det_ap") return Objective::kDetectionAp;
  throw Error(ErrorCode::kInvalidArgument, "unknown objective '" + std::string(name) + "'");
}

std::vector<SweepPoint> enumerate_grid(const SweepGrid& grid) {
  std::vector<SweepPoint> points;
  if (grid.variant == Variant::kGauss) {
    if (grid.gauss_threshold.empty() || grid.nms_distance.empty()) {
      throw Error(ErrorCode::kEmptyGrid, "gauss sweeps need gauss_threshold and nms_distance values");
    }
    if (grid.objective != Objective::kDetectionAp) {
      throw Error(ErrorCode::kInvalidArgument, "gauss sweeps only support the det_ap objective");
    }
    for (double t : grid.gauss_threshold) {
      for (int d : grid.nms_distance) points.push_back({PostprocConfig{}, NmsConfig{t, d}});
    }
    return points;
  }
  if (grid.seed_source.empty() || grid.seed_threshold.empty() || grid.foreground_threshold.empty() ||
      grid.cpv_seed_threshold.empty() || grid.dilate.empty()) {
    throw Error(ErrorCode::kEmptyGrid, "every post-processing grid needs at least one value");
  }
  for (SeedSource src : grid.seed_source) {
    for (double seed : grid.seed_threshold) {
      for (double cpv : grid.cpv_seed_threshold) {
        for (double fg : grid.foreground_threshold) {
          for (bool dilate : grid.dilate) {
            PostprocConfig cfg{grid.variant, src, seed, fg, cpv, dilate, grid.logits};
            validate(cfg);
            points.push_back({cfg, NmsConfig{}});
          }
        }
      }
    }
  }
  return points;
}

SweepResult run_sweep(const SweepGrid& grid, const std::vector<LabelVolume>& ground_truth,
                      const std::vector<std::vector<Volume>>& predictions,
                      const std::vector<std::string>& checkpoint_names, unsigned threads) {
  if (ground_truth.empty()) throw Error(ErrorCode::kEmptyList, "validation set is empty");
  if (predictions.empty()) throw Error(ErrorCode::kEmptyList, "no checkpoints");
  if (checkpoint_names.size() != predictions.size()) {
    throw Error(ErrorCode::kInvalidArgument, "one name per checkpoint required");
  }
  for (const auto& ckpt : predictions) {
    if (ckpt.size() != ground_truth.size()) {
      throw Error(ErrorCode::kInvalidArgument, "each checkpoint needs one prediction per validation volume");
    }
  }
  const std::vector<SweepPoint> points = enumerate_grid(grid);

  SweepResult result;
  result.variant = grid.variant;
  result.objective = grid.objective;
  result.objective_iou = grid.objective_iou;
  for (std::size_t k = 0; k < predictions.size(); ++k) {
    for (const SweepPoint& p : points) result.table.push_back({k, checkpoint_names[k], p, 0.0, {}});
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t r = next++; r < result.table.size(); r = next++) {
      try {
        SweepRow& row = result.table[r];
        std::vector<EvalReport> reports;
        for (std::size_t i = 0; i < ground_truth.size(); ++i) {
          reports.push_back(score_one(grid, row.point, ground_truth[i], predictions[row.checkpoint][i]));
        }
        row.report = aggregate_reports(reports);
        row.objective = objective_value(grid, row.report);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned n_workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(result.table.size())));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < n_workers; ++t) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t r = 1; r < result.table.size(); ++r) {
    if (result.table[r].objective > result.table[result.selected].objective) result.selected = r;
  }
  return result;
}

SweepResult run_sweep(const SweepSpec& spec, unsigned threads) {
  std::vector<LabelVolume> gt;
  for (const auto& path : spec.ground_truth) gt.push_back(io::read_label_volume(path));
  std::vector<std::vector<Volume>> preds;
  std::vector<std::string> names;
  for (const SweepCheckpoint& ckpt : spec.checkpoints) {
    names.push_back(ckpt.name);
    auto& set = preds.emplace_back();
    for (const auto& path : ckpt.predictions) set.push_back(io::read_real_volume(path));
  }
  return run_sweep(spec.grid, gt, preds, names, threads);
}

}  // namespace nucseg
