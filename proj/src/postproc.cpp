#include "nucseg/postproc.hpp"

#include <cmath>
#include <cstdint>
#include <queue>
#include <tuple>
#include <vector>

#include "nucseg/morphology.hpp"

namespace nucseg {
namespace {

// Main prediction channels, activated to probabilities where the variant needs it.
Volume main_probabilities(const Volume& pred, const PostprocConfig& cfg) {
  const Index main = prediction_channels(cfg.variant);
  if (pred.channels() != main && pred.channels() != main + kCpvChannels) {
    throw Error(ErrorCode::kWrongChannelCount,
                std::string(to_string(cfg.variant)) + " expects " + std::to_string(main) + " or " +
                    std::to_string(main + kCpvChannels) + " channels, got " + std::to_string(pred.channels()));
  }
  Volume p = slice_channels(pred, 0, main);
  if (!cfg.logits) return p;
  if (cfg.variant == Variant::kThreeLabel) {
    for (Index v = 0; v < p.voxels(); ++v) {
      const double m = std::max({p.at(0, v), p.at(1, v), p.at(2, v)});
      double e[3], sum = 0.0;
      for (int c = 0; c < 3; ++c) sum += (e[c] = std::exp(p.at(c, v) - m));
      for (int c = 0; c < 3; ++c) p.at(c, v) = e[c] / sum;
    }
  } else if (cfg.variant == Variant::kAffinities) {
    p.data() = 1.0 / (1.0 + (-p.data()).exp());
  }
  return p;
}

Mask to_mask(const Eigen::Array<bool, Eigen::Dynamic, 1>& flags, const Volume& like) {
  Mask m(like.shape(), 1, like.voxel_size());
  m.data() = flags.cast<std::uint8_t>();
  return m;
}

}  // namespace

std::string_view to_string(SeedSource s) { return s == SeedSource::kMain ? "main" : "cpv"; }

SeedSource parse_seed_source(std::string_view name) {
  if (name == "main") return SeedSource::kMain;
  if (name == "cpv") return SeedSource::kCpv;
  throw Error(ErrorCode::kInvalidArgument, "unknown seed source '" + std::string(name) + "'");
}

PostprocConfig default_postproc(Variant variant) {
  PostprocConfig cfg;
  cfg.variant = variant;
  switch (variant) {
    case Variant::kSdt:
      cfg.seed_threshold = -0.14;
      cfg.foreground_threshold = 0.0;
      cfg.cpv_seed_threshold = 70.0;
      cfg.dilate_result = true;
      break;
    case Variant::kThreeLabel:
      cfg.seed_threshold = 0.7;
      cfg.foreground_threshold = 0.95;
      cfg.cpv_seed_threshold = 80.0;
      cfg.dilate_result = false;
      break;
    case Variant::kAffinities:
      cfg.seed_threshold = 0.99;
      cfg.foreground_threshold = 0.99;
      cfg.cpv_seed_threshold = 70.0;
      cfg.dilate_result = true;
      break;
    case Variant::kGauss: break;
  }
  return cfg;
}

void validate(const PostprocConfig& cfg) {
  if (cfg.variant == Variant::kGauss) {
    throw Error(ErrorCode::kInvalidArgument, "gauss predictions are post-processed by nms_detect, not segment");
  }
  if (!std::isfinite(cfg.seed_threshold) || !std::isfinite(cfg.foreground_threshold) ||
      !std::isfinite(cfg.cpv_seed_threshold)) {
    throw Error(ErrorCode::kInvalidArgument, "thresholds must be finite");
  }
  if (cfg.cpv_seed_threshold < 0.0) throw Error(ErrorCode::kInvalidArgument, "cpv seed threshold must be >= 0");
}

TopographicMap build_topography(const Volume& pred, const PostprocConfig& cfg) {
  validate(cfg);
  const Volume p = main_probabilities(pred, cfg);
  TopographicMap map{Volume(pred.shape(), 1, pred.voxel_size()), Mask()};
  switch (cfg.variant) {
    case Variant::kSdt:
      map.height.data() = p.data();
      map.foreground = to_mask(p.data() <= cfg.foreground_threshold, p);
      break;
    case Variant::kThreeLabel:
      map.height.data() = 1.0 - p.channel(kInterior);
      map.foreground = to_mask((1.0 - p.channel(kBackground)) >= cfg.foreground_threshold, p);
      break;
    case Variant::kAffinities:
      map.height.data() = 1.0 - (p.channel(0) + p.channel(1) + p.channel(2)) / 3.0;
      map.foreground = to_mask(p.channel(3) >= cfg.foreground_threshold, p);
      break;
    case Variant::kGauss: break;
  }
  return map;
}

LabelVolume extract_seeds_main(const Volume& pred, const PostprocConfig& cfg) {
  validate(cfg);
  const Volume p = main_probabilities(pred, cfg);
  Mask seeds;
  switch (cfg.variant) {
    case Variant::kSdt: seeds = to_mask(p.data() < cfg.seed_threshold, p); break;
    case Variant::kThreeLabel: seeds = to_mask(p.channel(kInterior) >= cfg.seed_threshold, p); break;
    case Variant::kAffinities: {
      const auto above = (p.channel(0) >= cfg.seed_threshold).cast<int>() +
                         (p.channel(1) >= cfg.seed_threshold).cast<int>() +
                         (p.channel(2) >= cfg.seed_threshold).cast<int>();
      seeds = to_mask(above >= 2, p);
      break;
    }
    case Variant::kGauss: break;
  }
  return connected_components(seeds, Connectivity::kFace);
}

Volume cpv_votes(const Volume& cpv_pred, const Mask& fg_mask) {
  if (cpv_pred.channels() != kCpvChannels) throw Error(ErrorCode::kWrongChannelCount, "cpv prediction needs 3 channels");
  require_same_shape(cpv_pred, fg_mask, "cpv_votes: mask shape differs");
  const Shape& s = cpv_pred.shape();
  Volume votes(s, 1, cpv_pred.voxel_size());
  for (Index z = 0; z < s.nz; ++z) {
    for (Index y = 0; y < s.ny; ++y) {
      for (Index x = 0; x < s.nx; ++x) {
        if (fg_mask(z, y, x) == 0) continue;
        // std::round rounds halves away from zero.
        const double tz = std::round(static_cast<double>(z) + cpv_pred(0, z, y, x));
        const double ty = std::round(static_cast<double>(y) + cpv_pred(1, z, y, x));
        const double tx = std::round(static_cast<double>(x) + cpv_pred(2, z, y, x));
        if (!(tz >= 0 && ty >= 0 && tx >= 0 && tz < s.nz && ty < s.ny && tx < s.nx)) continue;
        votes(static_cast<Index>(tz), static_cast<Index>(ty), static_cast<Index>(tx)) += 1.0;
      }
    }
  }
  return votes;
}

LabelVolume extract_seeds_cpv(const Volume& cpv_pred, const Mask& fg_mask, double threshold) {
  if (!(threshold >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "cpv seed threshold must be >= 0");
  const Volume votes = cpv_votes(cpv_pred, fg_mask);
  return connected_components(to_mask(votes.data() >= threshold, votes), Connectivity::kFace);
}

LabelVolume watershed(const TopographicMap& map, const LabelVolume& seeds) {
  require_same_shape(map.height, seeds, "watershed: seeds shape differs from map");
  require_same_shape(map.height, map.foreground, "watershed: mask shape differs from map");
  const Shape& s = seeds.shape();
  LabelVolume out(s, 1, seeds.voxel_size());

  // (height, insertion sequence, voxel); min-heap on the first two.
  using Entry = std::tuple<double, std::uint64_t, Index>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  std::uint64_t sequence = 0;
  for (Index v = 0; v < s.voxels(); ++v) {
    if (seeds.at(0, v) <= 0 || map.foreground.at(0, v) == 0) continue;
    out.at(0, v) = seeds.at(0, v);
    open.emplace(map.height.at(0, v), sequence++, v);
  }
  while (!open.empty()) {
    const Index v = std::get<2>(open.top());
    open.pop();
    const Coord3 c = s.coord(v);
    for (const auto& o : kFaceOffsets) {
      const Coord3 n(c[0] + o[0], c[1] + o[1], c[2] + o[2]);
      if (!s.contains(n)) continue;
      const Index nv = s.linear(n);
      if (map.foreground.at(0, nv) == 0 || out.at(0, nv) != 0) continue;
      out.at(0, nv) = out.at(0, v);
      open.emplace(map.height.at(0, nv), sequence++, nv);
    }
  }
  return out;
}

LabelVolume segment(const Volume& pred, const PostprocConfig& cfg) {
  const TopographicMap map = build_topography(pred, cfg);
  LabelVolume seeds;
  if (cfg.seed_source == SeedSource::kMain) {
    seeds = extract_seeds_main(pred, cfg);
  } else {
    const Index main = prediction_channels(cfg.variant);
    if (pred.channels() != main + kCpvChannels) {
      throw Error(ErrorCode::kWrongChannelCount, "cpv seeds need " + std::to_string(main + kCpvChannels) +
                                                     " channels, got " + std::to_string(pred.channels()));
    }
    seeds = extract_seeds_cpv(slice_channels(pred, main, kCpvChannels), map.foreground, cfg.cpv_seed_threshold);
  }
  LabelVolume result = watershed(map, seeds);
  return cfg.dilate_result ? dilate_instances(result, 1) : result;
}

}  // namespace nucseg
