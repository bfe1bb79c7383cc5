#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "nucseg/cli.hpp"
#include "nucseg/detection.hpp"
#include "nucseg/io.hpp"
#include "nucseg/metrics.hpp"
#include "nucseg/phantom.hpp"
#include "nucseg/postproc.hpp"
#include "nucseg/serialize.hpp"

using namespace nucseg;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string p(const fs::path& path) { return path.string(); }

fs::path phantom_files(const fs::path& dir, bool touching = false) {
  PhantomConfig cfg;
  cfg.shape = {32, 32, 32};
  cfg.n_instances = 8;
  cfg.rng_seed = 12;
  cfg.allow_touching = touching;
  if (touching) cfg.min_gap = 0;
  io::write_text(dir / "phantom.json", io::dump(io::to_json(cfg)));
  REQUIRE(run({"phantom", p(dir / "phantom.json"), p(dir / "ph")}).code == 0);
  return dir / "ph_labels.v3d";
}

}  // namespace

TEST_CASE("cli phantom writes deterministic files") {
  const auto dir = fixture::temp_dir("cli_phantom");
  const auto labels = phantom_files(dir);
  CHECK(fs::exists(labels));
  CHECK(fs::exists(dir / "ph_raw.v3d"));
  const auto first = io::read_bytes(labels);
  const auto raw = io::read_bytes(dir / "ph_raw.v3d");
  phantom_files(dir);
  CHECK(io::read_bytes(labels) == first);
  CHECK(io::read_bytes(dir / "ph_raw.v3d") == raw);

  io::write_text(dir / "bad.json", R"({"shape": [10, 10, 10], "n_instances": 60, "max_attempts": 20})");
  const Run bad = run({"phantom", p(dir / "bad.json"), p(dir / "bad")});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("placement-failure") != std::string::npos);
  CHECK(bad.out.empty());
}

TEST_CASE("cli encode channel counts") {
  const auto dir = fixture::temp_dir("cli_encode");
  const auto labels = phantom_files(dir);
  CHECK(run({"encode", p(labels), p(dir / "a.v3d"), "--variant", "3label", "--with-cpv"}).code == 0);
  CHECK(io::decode_header(io::read_bytes(dir / "a.v3d")).channels == 4);
  CHECK(run({"encode", p(labels), p(dir / "b.v3d"), "--variant", "3label", "--with-cpv", "--one-hot"}).code == 0);
  CHECK(io::decode_header(io::read_bytes(dir / "b.v3d")).channels == 6);
  CHECK(run({"encode", p(labels), p(dir / "c.v3d"), "--variant", "sdt"}).code == 0);
  CHECK(io::decode_header(io::read_bytes(dir / "c.v3d")).channels == 1);
  CHECK(run({"encode", p(labels), p(dir / "g.v3d"), "--variant", "gauss", "--sigma", "2.0"}).code == 0);
  const Volume g = io::read_real_volume(dir / "g.v3d");
  CHECK(g.channels() == 1);
  // Centers are fractional: the nearest voxel is at most sqrt(3)/2 away.
  CHECK(g.data().maxCoeff() <= 1.0);
  CHECK(g.data().maxCoeff() >= std::exp(-0.75 / (2.0 * 4.0)));

  CHECK(run({"encode", p(labels), p(dir / "x.v3d"), "--variant", "unet"}).code != 0);
  CHECK(run({"encode", p(dir / "missing.v3d"), p(dir / "x.v3d")}).code == 2);
}

TEST_CASE("cli segment matches the library call byte for byte") {
  const auto dir = fixture::temp_dir("cli_segment");
  const auto labels = phantom_files(dir);
  const LabelVolume gt = io::read_label_volume(labels);

  REQUIRE(run({"encode", p(labels), p(dir / "sdt.v3d"), "--variant", "sdt", "--with-cpv"}).code == 0);
  REQUIRE(run({"segment", p(dir / "sdt.v3d"), p(dir / "seg.v3d"), "--variant", "sdt", "--seed-threshold", "-0.14",
               "--fg-threshold", "0.0", "--dilate"})
              .code == 0);
  const Volume pred = io::read_real_volume(dir / "sdt.v3d");
  CHECK(io::read_bytes(dir / "seg.v3d") == io::encode_volume(segment(pred, default_postproc(Variant::kSdt))));

  CHECK(run({"segment", p(dir / "sdt.v3d"), p(dir / "cpv.v3d"), "--seed-source", "cpv", "--cpv-seed-threshold", "70"})
            .code == 0);
  PostprocConfig cfg = default_postproc(Variant::kSdt);
  cfg.seed_source = SeedSource::kCpv;
  CHECK(io::read_bytes(dir / "cpv.v3d") == io::encode_volume(segment(pred, cfg)));

  REQUIRE(run({"encode", p(labels), p(dir / "plain.v3d"), "--variant", "sdt"}).code == 0);
  const Run no_cpv = run({"segment", p(dir / "plain.v3d"), p(dir / "x.v3d"), "--seed-source", "cpv"});
  CHECK(no_cpv.code == 2);
  CHECK(no_cpv.err.find("wrong-channel-count") != std::string::npos);

  REQUIRE(run({"encode", p(labels), p(dir / "tl.v3d"), "--variant", "3label", "--one-hot"}).code == 0);
  CHECK(run({"segment", p(dir / "tl.v3d"), p(dir / "tl_seg.v3d"), "--variant", "3label", "--seed-threshold", "0.7",
             "--fg-threshold", "0.95"})
            .code == 0);
  CHECK(segmentation_ap(gt, io::read_label_volume(dir / "tl_seg.v3d"), 0.5).ap() == 1.0);

  CHECK(run({"segment", p(dir / "tl.v3d"), p(dir / "x.v3d"), "--variant", "sdt"}).code == 2);
}

TEST_CASE("cli detect and evaluate") {
  const auto dir = fixture::temp_dir("cli_detect");
  const auto labels = phantom_files(dir);
  const LabelVolume gt = io::read_label_volume(labels);
  REQUIRE(run({"encode", p(labels), p(dir / "g.v3d"), "--variant", "gauss"}).code == 0);
  for (auto [thr, dist] : {std::pair{"0.25", "3"}, std::pair{"0.35", "2"}}) {
    REQUIRE(run({"detect", p(dir / "g.v3d"), p(dir / "d.csv"), "--gauss-threshold", thr, "--nms-distance", dist}).code ==
            0);
    const DetectionList want =
        nms_detect(io::read_real_volume(dir / "g.v3d"), NmsConfig{std::stod(thr), std::stoi(dist)});
    CHECK(io::read_text(dir / "d.csv") == io::format_detections(want));
  }
  REQUIRE(run({"detect", p(dir / "g.v3d"), p(dir / "none.csv"), "--gauss-threshold", "1.1"}).code == 0);
  CHECK(io::read_text(dir / "none.csv") == "z,y,x,score\n");

  const Run self = run({"evaluate", p(labels), p(dir / "r.json"), "--seg", p(labels), "--dets", p(dir / "d.csv")});
  CHECK(self.code == 0);
  CHECK(self.out.find("avAP 1.000000") != std::string::npos);
  CHECK(self.out.find("detection AP ") != std::string::npos);

  io::write_volume(dir / "empty.v3d", LabelVolume(gt.shape()));
  const Run empty = run({"evaluate", p(labels), p(dir / "e.json"), "--seg", p(dir / "empty.v3d")});
  CHECK(empty.out == "avAP 0.000000\n");

  REQUIRE(run({"encode", p(labels), p(dir / "sdt.v3d")}).code == 0);
  REQUIRE(run({"perturb", p(dir / "sdt.v3d"), p(dir / "noisy.v3d"), "--noise", "0.2", "--smoothing", "1", "--seed", "3"})
              .code == 0);
  REQUIRE(run({"segment", p(dir / "noisy.v3d"), p(dir / "seg.v3d")}).code == 0);
  REQUIRE(run({"evaluate", p(labels), p(dir / "s.json"), "--seg", p(dir / "seg.v3d"), "--dets", p(dir / "d.csv")}).code ==
          0);
  const LabelVolume seg = io::read_label_volume(dir / "seg.v3d");
  const DetectionList dets = io::read_detections(dir / "d.csv");
  CHECK(io::read_text(dir / "s.json") == io::dump(io::to_json(evaluate(gt, &seg, &dets))));
}

TEST_CASE("cli sweep is deterministic across thread counts") {
  const auto dir = fixture::temp_dir("cli_sweep");
  const auto labels = phantom_files(dir);
  REQUIRE(run({"encode", p(labels), p(dir / "sdt.v3d")}).code == 0);
  io::Json spec{{"variant", "sdt"},
                {"grid", {{"seed_threshold", {-0.3, -0.14}}, {"foreground_threshold", {0.0}}, {"dilate", {false, true}}}},
                {"ground_truth", {"ph_labels.v3d"}},
                {"checkpoints", io::Json::array()}};
  for (int k = 0; k < 2; ++k) {
    const std::string name = "ck" + std::to_string(k) + ".v3d";
    REQUIRE(run({"perturb", p(dir / "sdt.v3d"), p(dir / name), "--noise", k ? "0.3" : "0.05", "--seed", "1"}).code == 0);
    spec["checkpoints"].push_back({{"name", "ck" + std::to_string(k)}, {"predictions", {name}}});
  }
  io::write_text(dir / "spec.json", io::dump(spec));
  const Run a = run({"sweep", p(dir / "spec.json"), p(dir / "a.json"), "--threads", "1"});
  const Run b = run({"sweep", p(dir / "spec.json"), p(dir / "b.json"), "--threads", "4"});
  CHECK(a.code == 0);
  CHECK(a.out.rfind("selected ", 0) == 0);
  CHECK(a.out == b.out);
  CHECK(io::read_bytes(dir / "a.json") == io::read_bytes(dir / "b.json"));
  const io::Json result = io::parse_json_file(dir / "a.json");
  CHECK(result.at("table").size() == 8);

  io::write_text(dir / "bad.json", R"({"variant": "sdt", "grid": {}, "ground_truth": ["ph_labels.v3d"],
    "checkpoints": [{"name": "x", "predictions": ["ck0.v3d"]}]})");
  const Run bad = run({"sweep", p(dir / "bad.json"), p(dir / "c.json")});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("empty-grid") != std::string::npos);
}

TEST_CASE("cli usage errors") {
  CHECK(run({}).code != 0);
  CHECK(run({"frobnicate"}).code != 0);
  const Run help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("segment") != std::string::npos);
}
