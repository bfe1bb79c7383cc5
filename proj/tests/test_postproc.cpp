#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "nucseg/metrics.hpp"
#include "nucseg/morphology.hpp"
#include "nucseg/postproc.hpp"
#include "oracles.hpp"

using namespace nucseg;

namespace {

LabelVolume two_spheres() {
  auto l = fixture::labels(16, 16, 28);
  fixture::sphere(l, Point3(8, 8, 7), 4.5, 1);
  fixture::sphere(l, Point3(8, 8, 20), 4.5, 2);
  return l;
}

std::int64_t count_ids(const LabelVolume& l) { return static_cast<std::int64_t>(instance_ids(l).size()); }

}  // namespace

TEST_CASE("default rows") {
  const auto sdt = default_postproc(Variant::kSdt);
  CHECK(sdt.seed_threshold == -0.14);
  CHECK(sdt.foreground_threshold == 0.0);
  CHECK(sdt.cpv_seed_threshold == 70.0);
  CHECK(sdt.dilate_result);
  const auto tl = default_postproc(Variant::kThreeLabel);
  CHECK(tl.seed_threshold == 0.7);
  CHECK(tl.foreground_threshold == 0.95);
  CHECK(!tl.dilate_result);
  const auto aff = default_postproc(Variant::kAffinities);
  CHECK(aff.seed_threshold == 0.99);
  CHECK(aff.foreground_threshold == 0.99);
  CHECK(aff.dilate_result);
  CHECK_THROWS_AS(validate(default_postproc(Variant::kGauss)), Error);
  PostprocConfig bad = sdt;
  bad.cpv_seed_threshold = -1;
  CHECK_THROWS_AS(validate(bad), Error);
}

TEST_CASE("build_topography") {
  auto l = fixture::labels(11, 11, 11);
  fixture::sphere(l, Point3(5, 5, 5), 3.5, 1);
  const auto sdt = build_topography(encode_sdt(l), default_postproc(Variant::kSdt));
  for (Index v = 0; v < l.voxels(); ++v) CHECK((sdt.foreground.at(0, v) != 0) == (l.at(0, v) > 0));

  const Volume onehot = one_hot_three_label(encode_three_label(l));
  const auto tl = build_topography(onehot, default_postproc(Variant::kThreeLabel));
  for (Index v = 0; v < l.voxels(); ++v) CHECK(tl.height.at(0, v) == (onehot.at(kInterior, v) == 1.0 ? 0.0 : 1.0));

  const Volume ones(Shape{3, 3, 3}, 4, {}, 1.0);
  const auto aff = build_topography(ones, default_postproc(Variant::kAffinities));
  CHECK((aff.height.data() == 0.0).all());
  CHECK((aff.foreground.data() == 1).all());

  CHECK_THROWS_AS(build_topography(Volume(Shape{3, 3, 3}, 2), default_postproc(Variant::kSdt)), Error);
  try {
    build_topography(Volume(Shape{3, 3, 3}, 2), default_postproc(Variant::kThreeLabel));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kWrongChannelCount);
  }
}

TEST_CASE("logit inputs give the same topography as their probabilities") {
  std::mt19937_64 rng(61);
  const Volume logits = fixture::random_volume(rng, Shape{4, 4, 4}, 4, -5, 5);
  Volume probs = logits;
  probs.data() = 1.0 / (1.0 + (-logits.data()).exp());
  PostprocConfig cfg = default_postproc(Variant::kAffinities);
  cfg.seed_threshold = cfg.foreground_threshold = 0.6;
  const auto a = build_topography(probs, cfg);
  cfg.logits = true;
  const auto b = build_topography(logits, cfg);
  CHECK((a.height.data() - b.height.data()).abs().maxCoeff() < 1e-15);
  CHECK(a.foreground == b.foreground);
}

TEST_CASE("extract_seeds_main") {
  const LabelVolume l = two_spheres();
  const Volume sdt = encode_sdt(l);
  const LabelVolume seeds = extract_seeds_main(sdt, default_postproc(Variant::kSdt));
  Mask below(l.shape());
  for (Index v = 0; v < l.voxels(); ++v) below.at(0, v) = sdt.at(0, v) < -0.14;
  const auto want = oracle::union_find_components(below, false);
  for (Index v = 0; v < l.voxels(); ++v) CHECK(seeds.at(0, v) == want[static_cast<std::size_t>(v)]);
  CHECK(count_ids(seeds) == 2);

  const Volume onehot = one_hot_three_label(encode_three_label(l));
  const LabelVolume tl = extract_seeds_main(onehot, default_postproc(Variant::kThreeLabel));
  for (Index v = 0; v < l.voxels(); ++v) CHECK((tl.at(0, v) != 0) == (onehot.at(kInterior, v) == 1.0));

  Volume aff(Shape{1, 1, 3}, 4);
  aff(0, 0, 0, 0) = 1.0;
  aff(0, 0, 0, 1) = 1.0;
  aff(1, 0, 0, 1) = 1.0;
  aff(0, 0, 0, 2) = 0.98;
  aff(2, 0, 0, 2) = 1.0;
  const LabelVolume as = extract_seeds_main(aff, default_postproc(Variant::kAffinities));
  CHECK(as(0, 0, 0) == 0);
  CHECK(as(0, 0, 1) == 1);
  CHECK(as(0, 0, 2) == 0);
}

TEST_CASE("cpv votes") {
  auto l = fixture::labels(12, 12, 12);
  fixture::sphere(l, Point3(6, 6, 6), 3.7, 1);
  const auto n = (l.data() > 0).count();
  CHECK(n >= 200);
  const Mask fg = foreground_mask(l);
  const Volume votes = cpv_votes(encode_cpv(l), fg);
  CHECK(votes.data().sum() == static_cast<double>(n));
  CHECK(votes(6, 6, 6) == static_cast<double>(n));
  const LabelVolume seeds = extract_seeds_cpv(encode_cpv(l), fg, 70);
  CHECK(count_ids(seeds) == 1);
  CHECK((seeds.data() != 0).count() == 1);
  CHECK(seeds(6, 6, 6) == 1);

  const Volume zero(l.shape(), 3);
  CHECK((extract_seeds_cpv(zero, fg, 2).data() == 0).all());
  CHECK((extract_seeds_cpv(zero, fg, 0).data() != 0).all());

  Volume out(Shape{1, 1, 2}, 3);
  out(2, 0, 0, 1) = 5.0;
  Mask m(Shape{1, 1, 2}, 1, {}, 1);
  CHECK(cpv_votes(out, m).data().sum() == 1.0);

  Volume half(Shape{1, 1, 4}, 3);
  half(2, 0, 0, 0) = 1.5;
  half(2, 0, 0, 3) = -0.5;
  Mask ends(Shape{1, 1, 4});
  ends(0, 0, 0) = ends(0, 0, 3) = 1;
  const Volume hv = cpv_votes(half, ends);
  CHECK(hv(0, 0, 2) == 1.0);
  CHECK(hv(0, 0, 3) == 1.0);
}

TEST_CASE("watershed") {
  // Dumbbell along x with a ridge at the neck.
  TopographicMap map{Volume(Shape{3, 3, 11}), Mask(Shape{3, 3, 11})};
  for (Index z = 0; z < 3; ++z)
    for (Index y = 0; y < 3; ++y)
      for (Index x = 0; x < 11; ++x) {
        const bool neck = x >= 4 && x <= 6;
        map.foreground(z, y, x) = !neck || (z == 1 && y == 1);
        map.height(z, y, x) = x == 5 ? 1.0 : std::abs(static_cast<double>(x) - (x < 5 ? 1.0 : 9.0)) / 10.0;
      }
  LabelVolume seeds(map.height.shape());
  seeds(1, 1, 1) = 1;
  seeds(1, 1, 9) = 2;
  const LabelVolume ws = watershed(map, seeds);
  CHECK(ws == oracle::brute_force_watershed(map.height, map.foreground, seeds));
  for (Index x = 0; x < 5; ++x) CHECK(ws(1, 1, x) == 1);
  for (Index x = 6; x < 11; ++x) CHECK(ws(1, 1, x) == 2);

  LabelVolume single(map.height.shape());
  single(0, 0, 0) = 3;
  const LabelVolume all = watershed(map, single);
  for (Index v = 0; v < all.voxels(); ++v) CHECK(all.at(0, v) == (map.foreground.at(0, v) ? 3 : 0));

  CHECK((watershed(map, LabelVolume(map.height.shape())).data() == 0).all());

  LabelVolume outside(map.height.shape());
  outside(0, 0, 5) = 4;
  CHECK((watershed(map, outside).data() == 0).all());
}

TEST_CASE("watershed matches the step-by-step flood on random topographies") {
  std::mt19937_64 rng(67);
  for (int trial = 0; trial < 15; ++trial) {
    const Shape s{8, 8, 8};
    TopographicMap map{fixture::random_volume(rng, s, 1, 0, 1), Mask(s)};
    // Coarse heights force many ties so the FIFO rule is exercised.
    for (Index v = 0; v < map.height.voxels(); ++v) map.height.at(0, v) = std::floor(map.height.at(0, v) * 4.0);
    for (Index v = 0; v < s.voxels(); ++v) map.foreground.at(0, v) = (rng() % 10) < 8;
    LabelVolume seeds(s);
    const int k = 2 + static_cast<int>(rng() % 3);
    for (int i = 1; i <= k; ++i) seeds.at(0, static_cast<Index>(rng() % s.voxels())) = i;
    const LabelVolume ws = watershed(map, seeds);
    CHECK(ws == oracle::brute_force_watershed(map.height, map.foreground, seeds));

    std::set<std::int32_t> seed_ids;
    for (Index v = 0; v < s.voxels(); ++v) {
      if (seeds.at(0, v) > 0 && map.foreground.at(0, v)) CHECK(ws.at(0, v) == seeds.at(0, v));
      if (seeds.at(0, v) > 0) seed_ids.insert(seeds.at(0, v));
      if (!map.foreground.at(0, v)) CHECK(ws.at(0, v) == 0);
    }
    for (auto id : instance_ids(ws)) CHECK(seed_ids.count(id) == 1);
  }
}

TEST_CASE("segment on exact targets of isolated instances") {
  const LabelVolume l = two_spheres();
  for (Variant v : {Variant::kSdt, Variant::kThreeLabel, Variant::kAffinities}) {
    const Volume pred = bundle_as_prediction(encode_bundle(l, v, false), v);
    const LabelVolume seg = segment(pred, default_postproc(v));
    CHECK(count_ids(seg) == 2);
    CHECK(segmentation_ap(l, seg, 0.5).ap() == 1.0);
    CHECK(segment(pred, default_postproc(v)) == seg);
  }
  const LabelVolume empty = segment(Volume(l.shape(), 1, {}, 1.0), default_postproc(Variant::kSdt));
  CHECK((empty.data() == 0).all());
}

TEST_CASE("sdt segmentation of a large sphere reaches IoU 0.9 despite the dilation shell") {
  // Dilating the exact foreground adds one voxel shell, so IoU ~ 1 / (1 + 3 / r).
  auto l = fixture::labels(64, 64, 64);
  fixture::sphere(l, Point3(32, 32, 32), 29.0, 1);
  const LabelVolume seg = segment(encode_sdt(l), default_postproc(Variant::kSdt));
  const auto pairs = iou_matrix(l, seg);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].iou() >= 0.9);
}

TEST_CASE("segment with cpv seeds needs the cpv channels") {
  const LabelVolume l = two_spheres();
  PostprocConfig cfg = default_postproc(Variant::kSdt);
  cfg.seed_source = SeedSource::kCpv;
  CHECK_THROWS_AS(segment(encode_sdt(l), cfg), Error);
  const LabelVolume seg = segment(encode_bundle(l, Variant::kSdt, true), cfg);
  CHECK(count_ids(seg) == 2);
  CHECK(segmentation_ap(l, seg, 0.5).ap() == 1.0);
  CHECK(parse_seed_source(to_string(SeedSource::kCpv)) == SeedSource::kCpv);
}
