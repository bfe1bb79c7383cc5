#include "nucseg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "nucseg/morphology.hpp"

namespace nucseg {

std::vector<IouEntry> iou_matrix(const LabelVolume& gt, const LabelVolume& pred) {
  require_same_shape(gt, pred, "iou_matrix: shapes differ");
  std::map<std::int32_t, std::int64_t> gt_size, pred_size;
  std::map<std::pair<std::int32_t, std::int32_t>, std::int64_t> overlap;
  for (Index v = 0; v < gt.voxels(); ++v) {
    const std::int32_t g = gt.at(0, v);
    const std::int32_t p = pred.at(0, v);
    if (g > 0) ++gt_size[g];
    if (p > 0) ++pred_size[p];
    if (g > 0 && p > 0) ++overlap[{g, p}];
  }
  std::vector<IouEntry> out;
  out.reserve(overlap.size());
  for (const auto& [key, inter] : overlap) {
    out.push_back({key.first, key.second, inter, gt_size[key.first] + pred_size[key.second] - inter});
  }
  return out;
}

ApCounts match_instances(const std::vector<IouEntry>& pairs, std::int64_t n_gt, std::int64_t n_pred,
                         double iou_threshold) {
  std::vector<IouEntry> eligible;
  for (const IouEntry& e : pairs) {
    if (e.iou() > iou_threshold) eligible.push_back(e);
  }
  // Exact rational comparison of IoUs: a/b > c/d  <=>  a*d > c*b.
  std::sort(eligible.begin(), eligible.end(), [](const IouEntry& a, const IouEntry& b) {
    const auto lhs = static_cast<__int128>(a.intersection) * b.union_size;
    const auto rhs = static_cast<__int128>(b.intersection) * a.union_size;
    if (lhs != rhs) return lhs > rhs;
    if (a.gt_id != b.gt_id) return a.gt_id < b.gt_id;
    return a.pred_id < b.pred_id;
  });
  std::map<std::int32_t, bool> gt_used, pred_used;
  std::int64_t tp = 0;
  for (const IouEntry& e : eligible) {
    if (gt_used[e.gt_id] || pred_used[e.pred_id]) continue;
    gt_used[e.gt_id] = pred_used[e.pred_id] = true;
    ++tp;
  }
  return {tp, n_pred - tp, n_gt - tp};
}

ApCounts segmentation_ap(const LabelVolume& gt, const LabelVolume& pred, double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "IoU threshold must lie in (0, 1)");
  }
  const auto pairs = iou_matrix(gt, pred);
  return match_instances(pairs, static_cast<std::int64_t>(instance_ids(gt).size()),
                         static_cast<std::int64_t>(instance_ids(pred).size()), iou_threshold);
}

ApCounts detection_ap(const LabelVolume& gt, const DetectionList& dets) {
  const Shape& s = gt.shape();
  struct Hit {
    double score;
    Index raster;
    std::size_t order;
  };
  std::map<std::int32_t, Hit> best;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    const Point3 r = dets[i].position.array().round().matrix();
    if (!r.allFinite() || !(r[0] >= 0 && r[1] >= 0 && r[2] >= 0 && r[0] < s.nz && r[1] < s.ny && r[2] < s.nx)) {
      continue;
    }
    const Coord3 c = r.cast<Index>();
    const std::int32_t id = gt(c[0], c[1], c[2]);
    if (id <= 0) continue;
    const Hit h{dets[i].score, s.linear(c), i};
    auto it = best.find(id);
    if (it == best.end()) {
      best.emplace(id, h);
      continue;
    }
    const Hit& cur = it->second;
    if (h.score > cur.score || (h.score == cur.score && h.raster < cur.raster)) it->second = h;
  }
  const auto tp = static_cast<std::int64_t>(best.size());
  const auto n_gt = static_cast<std::int64_t>(instance_ids(gt).size());
  return {tp, static_cast<std::int64_t>(dets.size()) - tp, n_gt - tp};
}

std::array<double, 9> iou_thresholds() {
  std::array<double, 9> t{};
  for (int i = 0; i < 9; ++i) t[i] = (i + 1) / 10.0;
  return t;
}

double SegmentationScores::ap_at(double threshold) const {
  const auto t = iou_thresholds();
  for (int i = 0; i < 9; ++i) {
    if (std::abs(t[i] - threshold) < 1e-9) return ap[i];
  }
  throw Error(ErrorCode::kInvalidArgument, "no AP stored for IoU threshold " + std::to_string(threshold));
}

EvalReport evaluate(const LabelVolume& gt, const LabelVolume* seg, const DetectionList* dets) {
  EvalReport report;
  if (seg != nullptr) {
    const auto pairs = iou_matrix(gt, *seg);
    const auto n_gt = static_cast<std::int64_t>(instance_ids(gt).size());
    const auto n_pred = static_cast<std::int64_t>(instance_ids(*seg).size());
    SegmentationScores scores;
    const auto thresholds = iou_thresholds();
    for (int i = 0; i < 9; ++i) {
      scores.counts[i] = match_instances(pairs, n_gt, n_pred, thresholds[i]);
      scores.ap[i] = scores.counts[i].ap();
    }
    scores.av_ap = std::accumulate(scores.ap.begin(), scores.ap.end(), 0.0) / 9.0;
    report.segmentation = scores;
  }
  if (dets != nullptr) {
    report.detection_counts = detection_ap(gt, *dets);
    report.detection_ap = report.detection_counts->ap();
  }
  return report;
}

EvalReport aggregate_reports(const std::vector<EvalReport>& reports) {
  if (reports.empty()) throw Error(ErrorCode::kEmptyList, "no reports to aggregate");
  const bool has_seg = reports.front().segmentation.has_value();
  const bool has_det = reports.front().detection_ap.has_value();
  for (const EvalReport& r : reports) {
    if (r.segmentation.has_value() != has_seg || r.detection_ap.has_value() != has_det) {
      throw Error(ErrorCode::kInvalidArgument, "reports carry different sections");
    }
  }
  const auto n = static_cast<double>(reports.size());
  EvalReport out;
  if (has_seg) {
    SegmentationScores mean;
    for (const EvalReport& r : reports) {
      for (int i = 0; i < 9; ++i) {
        mean.ap[i] += r.segmentation->ap[i];
        mean.counts[i].tp += r.segmentation->counts[i].tp;
        mean.counts[i].fp += r.segmentation->counts[i].fp;
        mean.counts[i].fn += r.segmentation->counts[i].fn;
      }
      mean.av_ap += r.segmentation->av_ap;
    }
    for (double& ap : mean.ap) ap /= n;
    mean.av_ap /= n;
    out.segmentation = mean;
  }
  if (has_det) {
    double sum = 0.0;
    ApCounts counts;
    for (const EvalReport& r : reports) {
      sum += *r.detection_ap;
      counts.tp += r.detection_counts->tp;
      counts.fp += r.detection_counts->fp;
      counts.fn += r.detection_counts->fn;
    }
    out.detection_ap = sum / n;
    out.detection_counts = counts;
  }
  return out;
}

}  // namespace nucseg
