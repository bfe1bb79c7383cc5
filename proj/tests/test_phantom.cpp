#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "nucseg/metrics.hpp"
#include "nucseg/morphology.hpp"
#include "nucseg/phantom.hpp"
#include "nucseg/postproc.hpp"
#include "nucseg/targets.hpp"
#include "oracles.hpp"

using namespace nucseg;

namespace {

// Minimum Chebyshev distance between voxels of a and b, minus one.
Index gap(const std::vector<Coord3>& a, const std::vector<Coord3>& b) {
  Index best = std::numeric_limits<Index>::max();
  for (const Coord3& p : a)
    for (const Coord3& q : b) best = std::min(best, (p - q).cwiseAbs().maxCoeff());
  return best - 1;
}

std::map<std::int32_t, std::vector<Coord3>> voxels_by_id(const LabelVolume& l) {
  std::map<std::int32_t, std::vector<Coord3>> out;
  for (const Coord3& c : oracle::all_voxels(l.shape())) {
    if (l(c[0], c[1], c[2]) > 0) out[l(c[0], c[1], c[2])].push_back(c);
  }
  return out;
}

}  // namespace

TEST_CASE("PortableRng sequence is pinned") {
  PortableRng a(42), b(42);
  std::mt19937_64 ref(42);
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform();
    CHECK(u == static_cast<double>(ref() >> 11) * 0x1.0p-53);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    b.uniform();
  }
  CHECK(a.normal() == b.normal());
  PortableRng c(7);
  std::mt19937_64 r7(7);
  const double u1 = static_cast<double>(r7() >> 11) * 0x1.0p-53;
  const double u2 = static_cast<double>(r7() >> 11) * 0x1.0p-53;
  const double want = std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * M_PI * u2);
  CHECK(c.normal() == want);
}

TEST_CASE("normal draws have unit variance") {
  PortableRng rng(3);
  double sum = 0, sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sq += x * x;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sq / n - 1.0) < 0.02);
}

TEST_CASE("generate_phantom basics") {
  PhantomConfig cfg;
  cfg.n_instances = 0;
  cfg.shape = {10, 10, 10};
  const Phantom empty = generate_phantom(cfg);
  CHECK((empty.labels.data() == 0).all());
  CHECK(empty.raw.data().abs().maxCoeff() > 0.0);

  cfg.n_instances = 12;
  cfg.shape = {32, 32, 32};
  cfg.rng_seed = 9;
  const Phantom a = generate_phantom(cfg);
  const Phantom b = generate_phantom(cfg);
  CHECK(a.labels == b.labels);
  CHECK(a.raw == b.raw);
  CHECK(instance_ids(a.labels).size() == 12);
  CHECK(instance_ids(a.labels).back() == 12);

  cfg.rng_seed = 10;
  CHECK(!(generate_phantom(cfg).labels == a.labels));
}

TEST_CASE("non-touching phantom respects the minimum gap") {
  PhantomConfig cfg;
  cfg.n_instances = 20;
  cfg.min_gap = 2;
  cfg.rng_seed = 4;
  const Phantom p = generate_phantom(cfg);
  const auto ids = voxels_by_id(p.labels);
  REQUIRE(ids.size() == 20);
  for (auto a = ids.begin(); a != ids.end(); ++a)
    for (auto b = std::next(a); b != ids.end(); ++b) CHECK(gap(a->second, b->second) >= 2);

  // Every face neighbour of an instance voxel is background or the same instance.
  for (const Coord3& c : oracle::all_voxels(p.labels.shape())) {
    const auto id = p.labels(c[0], c[1], c[2]);
    if (id == 0) continue;
    for (const auto& o : kFaceOffsets) {
      const Coord3 n(c[0] + o[0], c[1] + o[1], c[2] + o[2]);
      if (p.labels.shape().contains(n)) CHECK((p.labels(n[0], n[1], n[2]) == 0 || p.labels(n[0], n[1], n[2]) == id));
    }
  }
}

TEST_CASE("touching phantom places instances in contact") {
  PhantomConfig cfg;
  cfg.n_instances = 20;
  cfg.allow_touching = true;
  cfg.min_gap = 0;
  cfg.rng_seed = 5;
  const Phantom p = generate_phantom(cfg);
  CHECK(instance_ids(p.labels).size() == 20);
  int contacts = 0;
  for (const Coord3& c : oracle::all_voxels(p.labels.shape())) {
    const auto id = p.labels(c[0], c[1], c[2]);
    if (id == 0 || c[2] + 1 >= p.labels.shape().nx) continue;
    const auto other = p.labels(c[0], c[1], c[2] + 1);
    if (other != 0 && other != id) ++contacts;
  }
  CHECK(contacts > 0);
}

TEST_CASE("impossible placement fails") {
  PhantomConfig cfg;
  cfg.shape = {12, 12, 12};
  cfg.n_instances = 50;
  cfg.max_attempts = 50;
  try {
    generate_phantom(cfg);
    FAIL("expected placement failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kPlacementFailure);
    CHECK(std::string(e.what()).find("placement-failure") != std::string::npos);
  }
}

TEST_CASE("gaussian_smooth") {
  Volume impulse(Shape{1, 1, 21});
  impulse(0, 0, 10) = 1.0;
  const Volume s = gaussian_smooth(impulse, 2.0);
  CHECK(std::abs(s.data().sum() - 1.0) < 1e-12);
  CHECK(std::abs(s(0, 0, 12) / s(0, 0, 10) - std::exp(-0.5)) < 1e-12);
  const Volume c(Shape{4, 5, 6}, 2, {}, 3.0);
  CHECK((gaussian_smooth(c, 1.5).data() - 3.0).abs().maxCoeff() < 1e-12);
  CHECK(gaussian_smooth(impulse, 0.0) == impulse);
}

TEST_CASE("perturb_target") {
  auto l = fixture::labels(10, 10, 10);
  fixture::box(l, 2, 8, 2, 8, 2, 8, 1);
  const Volume bundle = bundle_as_prediction(encode_bundle(l, Variant::kThreeLabel, true), Variant::kThreeLabel);
  const auto kinds = prediction_channel_kinds(Variant::kThreeLabel, true);
  REQUIRE(kinds.size() == 6);
  CHECK(kinds[0] == ChannelKind::kProbability);
  CHECK(kinds[5] == ChannelKind::kVector);
  CHECK(prediction_channel_kinds(Variant::kSdt, false) == std::vector<ChannelKind>{ChannelKind::kSigned});

  CHECK(perturb_target(bundle, kinds, 0.0, 0.0, 1) == bundle);
  const Volume a = perturb_target(bundle, kinds, 0.1, 1.0, 1);
  CHECK(a == perturb_target(bundle, kinds, 0.1, 1.0, 1));
  CHECK(!(a == perturb_target(bundle, kinds, 0.1, 1.0, 2)));
  const Volume probs = slice_channels(a, 0, 3);
  CHECK((probs.data() >= 0.0).all());
  CHECK((probs.data() <= 1.0).all());
  CHECK_THROWS_AS(perturb_target(bundle, prediction_channel_kinds(Variant::kSdt, false), 0.1, 0.0, 1), Error);
}

TEST_CASE("non-touching phantom has only background-facing boundary voxels") {
  PhantomConfig cfg;
  cfg.n_instances = 20;
  cfg.rng_seed = 6;
  const LabelVolume l = generate_phantom(cfg).labels;
  const Volume classes = encode_three_label(l);
  int boundary = 0;
  for (const Coord3& c : oracle::all_voxels(l.shape())) {
    if (classes(c[0], c[1], c[2]) != 2.0) continue;
    ++boundary;
    bool touches_background = false;
    for (const auto& o : kFaceOffsets) {
      const Coord3 n(c[0] + o[0], c[1] + o[1], c[2] + o[2]);
      touches_background = touches_background || !l.shape().contains(n) || l(n[0], n[1], n[2]) == 0;
    }
    CHECK(touches_background);
  }
  CHECK(boundary > 0);
}

TEST_CASE("lightly perturbed sdt still segments") {
  PhantomConfig cfg;
  cfg.n_instances = 30;
  cfg.rng_seed = 8;
  const LabelVolume gt = generate_phantom(cfg).labels;
  const Volume pred = perturb_target(encode_sdt(gt), prediction_channel_kinds(Variant::kSdt, false), 0.05, 0.0, 3);
  const ApCounts c = segmentation_ap(gt, segment(pred, default_postproc(Variant::kSdt)), 0.5);
  CHECK(c.tp >= 29);
}
