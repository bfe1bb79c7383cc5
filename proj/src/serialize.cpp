#include "nucseg/serialize.hpp"

#include <cstdio>

#include "nucseg/io.hpp"

namespace nucseg::io {
namespace {

std::string threshold_key(double t) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%.2f", t);
  return buf;
}

template <typename T>
T field(const Json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorCode::kConfigError, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigError, std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
void optional_field(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = field<T>(j, key);
}

Json counts_json(const ApCounts& c) { return Json{{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}}; }

ApCounts counts_from(const Json& j) {
  return {field<std::int64_t>(j, "tp"), field<std::int64_t>(j, "fp"), field<std::int64_t>(j, "fn")};
}

}  // namespace

Json to_json(const PostprocConfig& cfg) {
  return Json{{"variant", to_string(cfg.variant)},
              {"seed_source", to_string(cfg.seed_source)},
              {"seed_threshold", cfg.seed_threshold},
              {"foreground_threshold", cfg.foreground_threshold},
              {"cpv_seed_threshold", cfg.cpv_seed_threshold},
              {"dilate", cfg.dilate_result},
              {"logits", cfg.logits}};
}

PostprocConfig postproc_config_from_json(const Json& j) {
  PostprocConfig cfg;
  cfg.variant = parse_variant(field<std::string>(j, "variant"));
  if (j.contains("seed_source")) cfg.seed_source = parse_seed_source(field<std::string>(j, "seed_source"));
  optional_field(j, "seed_threshold", cfg.seed_threshold);
  optional_field(j, "foreground_threshold", cfg.foreground_threshold);
  optional_field(j, "cpv_seed_threshold", cfg.cpv_seed_threshold);
  optional_field(j, "dilate", cfg.dilate_result);
  optional_field(j, "logits", cfg.logits);
  validate(cfg);
  return cfg;
}

Json to_json(const NmsConfig& cfg) {
  return Json{{"gauss_threshold", cfg.gauss_threshold}, {"nms_distance", cfg.nms_distance}};
}

Json to_json(const PhantomConfig& cfg) {
  return Json{{"shape", {cfg.shape.nz, cfg.shape.ny, cfg.shape.nx}},
              {"n_instances", cfg.n_instances},
              {"radius_range", {cfg.radius_min, cfg.radius_max}},
              {"allow_touching", cfg.allow_touching},
              {"min_gap", cfg.min_gap},
              {"rng_seed", cfg.rng_seed},
              {"noise_sigma", cfg.noise_sigma},
              {"smoothing_sigma", cfg.smoothing_sigma},
              {"voxel_size", {cfg.voxel_size.dz, cfg.voxel_size.dy, cfg.voxel_size.dx}},
              {"max_attempts", cfg.max_attempts}};
}

PhantomConfig phantom_config_from_json(const Json& j) {
  PhantomConfig cfg;
  if (j.contains("shape")) {
    const auto s = field<std::vector<Index>>(j, "shape");
    if (s.size() != 3) throw Error(ErrorCode::kConfigError, "shape needs 3 entries");
    cfg.shape = {s[0], s[1], s[2]};
  }
  optional_field(j, "n_instances", cfg.n_instances);
  if (j.contains("radius_range")) {
    const auto r = field<std::vector<double>>(j, "radius_range");
    if (r.size() != 2) throw Error(ErrorCode::kConfigError, "radius_range needs 2 entries");
    cfg.radius_min = r[0];
    cfg.radius_max = r[1];
  }
  optional_field(j, "allow_touching", cfg.allow_touching);
  optional_field(j, "min_gap", cfg.min_gap);
  optional_field(j, "rng_seed", cfg.rng_seed);
  optional_field(j, "noise_sigma", cfg.noise_sigma);
  optional_field(j, "smoothing_sigma", cfg.smoothing_sigma);
  if (j.contains("voxel_size")) {
    const auto v = field<std::vector<double>>(j, "voxel_size");
    if (v.size() != 3) throw Error(ErrorCode::kConfigError, "voxel_size needs 3 entries");
    cfg.voxel_size = {v[0], v[1], v[2]};
  }
  optional_field(j, "max_attempts", cfg.max_attempts);
  return cfg;
}

Json to_json(const EvalReport& report) {
  Json j = Json::object();
  if (report.segmentation) {
    const auto& seg = *report.segmentation;
    const auto thresholds = iou_thresholds();
    Json ap = Json::object();
    Json counts = Json::object();
    for (int i = 0; i < 9; ++i) {
      ap[threshold_key(thresholds[i])] = seg.ap[i];
      counts[threshold_key(thresholds[i])] = counts_json(seg.counts[i]);
    }
    j["segmentation"] = Json{{"avAP", seg.av_ap}, {"AP", ap}, {"counts", counts}};
  }
  if (report.detection_ap) {
    Json det{{"AP", *report.detection_ap}};
    const Json c = counts_json(*report.detection_counts);
    for (const auto& [k, v] : c.items()) det[k] = v;
    j["detection"] = det;
  }
  return j;
}

EvalReport eval_report_from_json(const Json& j) {
  EvalReport report;
  if (j.contains("segmentation")) {
    const Json& s = j.at("segmentation");
    SegmentationScores seg;
    seg.av_ap = field<double>(s, "avAP");
    const auto thresholds = iou_thresholds();
    for (int i = 0; i < 9; ++i) {
      const std::string key = threshold_key(thresholds[i]);
      seg.ap[i] = field<double>(field<Json>(s, "AP"), key.c_str());
      seg.counts[i] = counts_from(field<Json>(field<Json>(s, "counts"), key.c_str()));
    }
    report.segmentation = seg;
  }
  if (j.contains("detection")) {
    const Json& d = j.at("detection");
    report.detection_ap = field<double>(d, "AP");
    report.detection_counts = counts_from(d);
  }
  return report;
}

SweepSpec sweep_spec_from_json(const Json& j, const std::filesystem::path& base_dir) {
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
  };
  SweepSpec spec;
  SweepGrid& g = spec.grid;
  g.variant = parse_variant(field<std::string>(j, "variant"));
  optional_field(j, "logits", g.logits);
  if (j.contains("objective")) g.objective = parse_objective(field<std::string>(j, "objective"));
  optional_field(j, "objective_iou", g.objective_iou);
  const Json grid = j.contains("grid") ? j.at("grid") : Json::object();
  if (grid.contains("seed_source")) {
    g.seed_source.clear();
    for (const auto& s : field<std::vector<std::string>>(grid, "seed_source")) g.seed_source.push_back(parse_seed_source(s));
  }
  optional_field(grid, "seed_threshold", g.seed_threshold);
  optional_field(grid, "foreground_threshold", g.foreground_threshold);
  optional_field(grid, "cpv_seed_threshold", g.cpv_seed_threshold);
  optional_field(grid, "dilate", g.dilate);
  optional_field(grid, "gauss_threshold", g.gauss_threshold);
  optional_field(grid, "nms_distance", g.nms_distance);
  // Parameters a sweep does not vary may be omitted.
  if (g.cpv_seed_threshold.empty()) g.cpv_seed_threshold = {PostprocConfig{}.cpv_seed_threshold};

  for (const auto& p : field<std::vector<std::string>>(j, "ground_truth")) spec.ground_truth.push_back(resolve(p));
  for (const Json& c : field<Json>(j, "checkpoints")) {
    SweepCheckpoint ckpt;
    ckpt.name = field<std::string>(c, "name");
    for (const auto& p : field<std::vector<std::string>>(c, "predictions")) ckpt.predictions.push_back(resolve(p));
    spec.checkpoints.push_back(std::move(ckpt));
  }
  if (spec.ground_truth.empty()) throw Error(ErrorCode::kEmptyList, "sweep spec has no validation volumes");
  if (spec.checkpoints.empty()) throw Error(ErrorCode::kEmptyList, "sweep spec has no checkpoints");
  return spec;
}

Json to_json(const SweepResult& result) {
  auto row_json = [&](const SweepRow& row, const Variant variant) {
    Json r{{"checkpoint", row.checkpoint_name}};
    r["config"] = variant == Variant::kGauss ? to_json(row.point.nms) : to_json(row.point.postproc);
    r["objective"] = row.objective;
    r["report"] = to_json(row.report);
    return r;
  };
  Json j{{"objective", to_string(result.objective)}};
  if (result.objective == Objective::kSegmentationAp) j["objective_iou"] = result.objective_iou;
  if (result.table.empty()) throw Error(ErrorCode::kEmptyGrid, "sweep produced no rows");
  const Variant shown = result.variant;
  j["selected_index"] = result.selected;
  j["selected"] = row_json(result.table[result.selected], shown);
  Json table = Json::array();
  for (const SweepRow& row : result.table) table.push_back(row_json(row, shown));
  j["table"] = table;
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json parse_json_file(const std::filesystem::path& path) {
  try {
    return Json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kConfigError, path.string() + ": " + e.what());
  }
}

}  // namespace nucseg::io
