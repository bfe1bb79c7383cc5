#include "nucseg/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "nucseg/detection.hpp"
#include "nucseg/io.hpp"
#include "nucseg/metrics.hpp"
#include "nucseg/phantom.hpp"
#include "nucseg/postproc.hpp"
#include "nucseg/serialize.hpp"
#include "nucseg/sweep.hpp"
#include "nucseg/targets.hpp"

namespace nucseg::cli {
namespace {

namespace fs = std::filesystem;

const std::vector<std::string> kVariants{"sdt", "3label", "affinities", "gauss"};

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

struct PhantomArgs {
  std::string config;
  std::string prefix;
};

struct EncodeArgs {
  std::string labels, out, variant = "sdt";
  bool with_cpv = false, one_hot = false, anisotropic = false;
  double tanh_scale = 5.0, sigma = 2.0;
};

struct PerturbArgs {
  std::string in, out, variant = "sdt";
  bool with_cpv = false;
  double noise = 0.0, smoothing = 0.0;
  std::uint64_t seed = 0;
};

struct SegmentArgs {
  std::string pred, out, variant = "sdt", seed_source = "main";
  std::optional<double> seed_threshold, fg_threshold, cpv_seed_threshold;
  std::optional<bool> dilate;
  bool logits = false;
};

struct DetectArgs {
  std::string pred, out;
  double gauss_threshold = 0.25;
  int nms_distance = 3;
};

struct EvaluateArgs {
  std::string gt, out, seg, dets;
};

struct SweepArgs {
  std::string spec, out;
  unsigned threads = 1;
};

void cmd_phantom(const PhantomArgs& a) {
  const PhantomConfig cfg = io::phantom_config_from_json(io::parse_json_file(a.config));
  const Phantom p = generate_phantom(cfg);
  io::write_volume(a.prefix + "_labels.v3d", p.labels);
  io::write_volume(a.prefix + "_raw.v3d", p.raw);
}

void cmd_encode(const EncodeArgs& a) {
  const Variant variant = parse_variant(a.variant);
  const LabelVolume labels = io::read_label_volume(a.labels);
  TargetParams params;
  params.tanh_scale = a.tanh_scale;
  params.gauss_sigma = a.sigma;
  params.anisotropic_edt = a.anisotropic;
  Volume bundle = encode_bundle(labels, variant, a.with_cpv, params);
  if (a.one_hot) bundle = bundle_as_prediction(bundle, variant);
  io::write_volume(a.out, bundle);
}

void cmd_perturb(const PerturbArgs& a) {
  const Variant variant = parse_variant(a.variant);
  const Volume in = io::read_real_volume(a.in);
  io::write_volume(a.out, perturb_target(in, prediction_channel_kinds(variant, a.with_cpv), a.noise, a.smoothing, a.seed));
}

void cmd_segment(const SegmentArgs& a) {
  PostprocConfig cfg = default_postproc(parse_variant(a.variant));
  cfg.seed_source = parse_seed_source(a.seed_source);
  if (a.seed_threshold) cfg.seed_threshold = *a.seed_threshold;
  if (a.fg_threshold) cfg.foreground_threshold = *a.fg_threshold;
  if (a.cpv_seed_threshold) cfg.cpv_seed_threshold = *a.cpv_seed_threshold;
  if (a.dilate) cfg.dilate_result = *a.dilate;
  cfg.logits = a.logits;
  const Volume pred = io::read_real_volume(a.pred);
  io::write_volume(a.out, segment(pred, cfg));
}

void cmd_detect(const DetectArgs& a) {
  const Volume pred = io::read_real_volume(a.pred);
  io::write_detections(a.out, nms_detect(pred, NmsConfig{a.gauss_threshold, a.nms_distance}));
}

void cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  const LabelVolume gt = io::read_label_volume(a.gt);
  std::optional<LabelVolume> seg;
  std::optional<DetectionList> dets;
  if (!a.seg.empty()) seg = io::read_label_volume(a.seg);
  if (!a.dets.empty()) dets = io::read_detections(a.dets);
  const EvalReport report = evaluate(gt, seg ? &*seg : nullptr, dets ? &*dets : nullptr);
  io::write_text(a.out, io::dump(io::to_json(report)));
  if (report.segmentation) out << "avAP " << fixed(report.segmentation->av_ap) << "\n";
  if (report.detection_ap) out << "detection AP " << fixed(*report.detection_ap) << "\n";
}

void cmd_sweep(const SweepArgs& a, std::ostream& out) {
  const fs::path spec_path(a.spec);
  const SweepSpec spec = io::sweep_spec_from_json(io::parse_json_file(spec_path), spec_path.parent_path());
  const SweepResult result = run_sweep(spec, a.threads);
  io::write_text(a.out, io::dump(io::to_json(result)));
  const SweepRow& best = result.table[result.selected];
  out << "selected " << best.checkpoint_name << " row " << result.selected << " objective " << fixed(best.objective)
      << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Volumetric nuclei segmentation toolkit: targets, post-processing, metrics", "nucseg"};
  app.require_subcommand(1);

  PhantomArgs phantom;
  auto* c_phantom = app.add_subcommand("phantom", "Generate a synthetic label volume and raw image");
  c_phantom->add_option("config", phantom.config, "Phantom config (JSON)")->required();
  c_phantom->add_option("out_prefix", phantom.prefix, "Writes <prefix>_labels.v3d and <prefix>_raw.v3d")->required();

  EncodeArgs encode;
  auto* c_encode = app.add_subcommand("encode", "Encode ground-truth labels into training targets");
  c_encode->add_option("labels", encode.labels)->required();
  c_encode->add_option("out", encode.out)->required();
  c_encode->add_option("--variant", encode.variant)->check(CLI::IsMember(kVariants));
  c_encode->add_flag("--with-cpv", encode.with_cpv, "Append center point vector channels");
  c_encode->add_option("--tanh-scale", encode.tanh_scale, "SDT tanh scale in voxels");
  c_encode->add_option("--sigma", encode.sigma, "Gaussian blob sigma in voxels");
  c_encode->add_flag("--anisotropic", encode.anisotropic, "Use the voxel size for SDT distances");
  c_encode->add_flag("--one-hot", encode.one_hot, "Write 3-label classes as per-class probabilities");

  PerturbArgs perturb;
  auto* c_perturb = app.add_subcommand("perturb", "Add seeded noise and smoothing to a prediction-shaped volume");
  c_perturb->add_option("in", perturb.in)->required();
  c_perturb->add_option("out", perturb.out)->required();
  c_perturb->add_option("--variant", perturb.variant)->check(CLI::IsMember(kVariants));
  c_perturb->add_flag("--with-cpv", perturb.with_cpv);
  c_perturb->add_option("--noise", perturb.noise);
  c_perturb->add_option("--smoothing", perturb.smoothing);
  c_perturb->add_option("--seed", perturb.seed);

  SegmentArgs seg;
  auto* c_segment = app.add_subcommand("segment", "Seeded watershed segmentation of a prediction");
  c_segment->add_option("pred", seg.pred)->required();
  c_segment->add_option("out", seg.out)->required();
  c_segment->add_option("--variant", seg.variant)->check(CLI::IsMember({"sdt", "3label", "affinities"}));
  c_segment->add_option("--seed-source", seg.seed_source)->check(CLI::IsMember({"main", "cpv"}));
  c_segment->add_option("--seed-threshold", seg.seed_threshold);
  c_segment->add_option("--fg-threshold", seg.fg_threshold);
  c_segment->add_option("--cpv-seed-threshold", seg.cpv_seed_threshold);
  c_segment->add_flag("--dilate,!--no-dilate", seg.dilate, "Dilate the result once (default per variant)");
  c_segment->add_flag("--logits", seg.logits, "Prediction holds logits rather than probabilities");

  DetectArgs det;
  auto* c_detect = app.add_subcommand("detect", "Non-maximum suppression on a Gaussian blob prediction");
  c_detect->add_option("pred", det.pred)->required();
  c_detect->add_option("out", det.out, "Detections CSV")->required();
  c_detect->add_option("--gauss-threshold", det.gauss_threshold);
  c_detect->add_option("--nms-distance", det.nms_distance)->check(CLI::PositiveNumber);

  EvaluateArgs ev;
  auto* c_eval = app.add_subcommand("evaluate", "Segmentation AP and detection AP against ground truth");
  c_eval->add_option("gt", ev.gt)->required();
  c_eval->add_option("out", ev.out, "Report (JSON)")->required();
  c_eval->add_option("--seg", ev.seg, "Segmentation label volume");
  c_eval->add_option("--dets", ev.dets, "Detections CSV");

  SweepArgs sweep;
  auto* c_sweep = app.add_subcommand("sweep", "Joint checkpoint and threshold selection on validation data");
  c_sweep->add_option("spec", sweep.spec, "Sweep spec (JSON)")->required();
  c_sweep->add_option("out", sweep.out, "Result table (JSON)")->required();
  c_sweep->add_option("--threads", sweep.threads)->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*c_phantom) cmd_phantom(phantom);
    if (*c_encode) cmd_encode(encode);
    if (*c_perturb) cmd_perturb(perturb);
    if (*c_segment) cmd_segment(seg);
    if (*c_detect) cmd_detect(det);
    if (*c_eval) cmd_evaluate(ev, out);
    if (*c_sweep) cmd_sweep(sweep, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace nucseg::cli
