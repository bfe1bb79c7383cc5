#include "nucseg/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nucseg {
namespace {

struct Ellipsoid {
  Point3 center;
  Point3 radii;

  double extent_along(const Point3& unit) const {
    return 1.0 / std::sqrt((unit.array() / radii.array()).square().sum());
  }
};

// Voxels inside the ellipsoid, or empty if any part leaves the volume.
std::vector<Coord3> rasterize(const Ellipsoid& e, const Shape& s) {
  std::vector<Coord3> voxels;
  Coord3 lo, hi;
  for (int a = 0; a < 3; ++a) {
    if (e.center[a] - e.radii[a] < 0.0 || e.center[a] + e.radii[a] > static_cast<double>(s[a] - 1)) return {};
    lo[a] = static_cast<Index>(std::ceil(e.center[a] - e.radii[a]));
    hi[a] = static_cast<Index>(std::floor(e.center[a] + e.radii[a]));
  }
  for (Index z = lo[0]; z <= hi[0]; ++z) {
    for (Index y = lo[1]; y <= hi[1]; ++y) {
      for (Index x = lo[2]; x <= hi[2]; ++x) {
        const Point3 d = (Point3(static_cast<double>(z), static_cast<double>(y), static_cast<double>(x)) - e.center)
                             .cwiseQuotient(e.radii);
        if (d.squaredNorm() <= 1.0) voxels.emplace_back(z, y, x);
      }
    }
  }
  return voxels;
}

bool respects_gap(const std::vector<Coord3>& voxels, const LabelVolume& labels, int gap) {
  const Shape& s = labels.shape();
  for (const Coord3& c : voxels) {
    for (Index z = std::max<Index>(0, c[0] - gap); z <= std::min(s.nz - 1, c[0] + gap); ++z) {
      for (Index y = std::max<Index>(0, c[1] - gap); y <= std::min(s.ny - 1, c[1] + gap); ++y) {
        for (Index x = std::max<Index>(0, c[2] - gap); x <= std::min(s.nx - 1, c[2] + gap); ++x) {
          if (labels(z, y, x) != 0) return false;
        }
      }
    }
  }
  return true;
}

Point3 random_direction(PortableRng& rng) {
  for (;;) {
    const Point3 d(rng.normal(), rng.normal(), rng.normal());
    const double n = d.norm();
    if (n > 1e-12) return d / n;
  }
}

}  // namespace

double PortableRng::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Phantom generate_phantom(const PhantomConfig& cfg) {
  if (cfg.n_instances < 0 || cfg.min_gap < 0 || cfg.max_attempts < 1) {
    throw Error(ErrorCode::kInvalidArgument, "instance count, gap and attempts must be non-negative");
  }
  if (!(cfg.radius_min >= 1.0 && cfg.radius_max >= cfg.radius_min)) {
    throw Error(ErrorCode::kInvalidArgument, "radii must satisfy 1 <= radius_min <= radius_max");
  }
  if (!(cfg.noise_sigma >= 0.0 && cfg.smoothing_sigma >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "noise and smoothing sigmas must be >= 0");
  }
  const Shape& s = cfg.shape;
  const int gap = cfg.allow_touching ? cfg.min_gap : std::max(cfg.min_gap, 1);
  PortableRng rng(cfg.rng_seed);
  LabelVolume labels(s, 1, cfg.voxel_size);
  std::vector<Ellipsoid> placed;
  std::vector<double> intensity;

  for (int id = 1; id <= cfg.n_instances; ++id) {
    bool ok = false;
    for (int attempt = 0; attempt < cfg.max_attempts && !ok; ++attempt) {
      Ellipsoid e;
      for (int a = 0; a < 3; ++a) e.radii[a] = rng.uniform(cfg.radius_min, cfg.radius_max);
      const bool contact = cfg.allow_touching && !placed.empty() && rng.uniform() < 0.5;
      std::vector<Coord3> voxels;
      if (contact) {
        const auto anchor_index = static_cast<std::size_t>(rng.uniform() * static_cast<double>(placed.size()));
        const Ellipsoid& anchor = placed[std::min(anchor_index, placed.size() - 1)];
        const Point3 dir = random_direction(rng);
        const double reach = anchor.extent_along(dir) + e.extent_along(dir);
        // Push outward until the surfaces no longer overlap.
        for (double scale : {1.0, 1.05, 1.1, 1.2, 1.3}) {
          e.center = anchor.center + dir * (reach * scale);
          voxels = rasterize(e, s);
          if (!voxels.empty() && respects_gap(voxels, labels, gap)) {
            ok = true;
            break;
          }
        }
      } else {
        for (int a = 0; a < 3; ++a) {
          e.center[a] = rng.uniform(e.radii[a], static_cast<double>(s[a] - 1) - e.radii[a]);
        }
        voxels = rasterize(e, s);
        ok = !voxels.empty() && respects_gap(voxels, labels, gap);
      }
      if (!ok) continue;
      for (const Coord3& c : voxels) labels(c[0], c[1], c[2]) = id;
      placed.push_back(e);
      intensity.push_back(rng.uniform(0.5, 1.0));
    }
    if (!ok) {
      throw Error(ErrorCode::kPlacementFailure,
                  "could not place instance " + std::to_string(id) + " after " + std::to_string(cfg.max_attempts) +
                      " attempts");
    }
  }

  Volume raw(s, 1, cfg.voxel_size);
  for (Index v = 0; v < raw.voxels(); ++v) {
    const std::int32_t id = labels.at(0, v);
    if (id > 0) raw.at(0, v) = intensity[static_cast<std::size_t>(id - 1)];
  }
  if (cfg.smoothing_sigma > 0.0) raw = gaussian_smooth(raw, cfg.smoothing_sigma);
  if (cfg.noise_sigma > 0.0) {
    for (Index v = 0; v < raw.voxels(); ++v) raw.at(0, v) += cfg.noise_sigma * rng.normal();
  }
  return {std::move(labels), std::move(raw)};
}

Volume gaussian_smooth(const Volume& v, double sigma) {
  if (!(sigma >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "smoothing sigma must be >= 0");
  if (sigma == 0.0) return v;
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double total = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    total += kernel[static_cast<std::size_t>(k + radius)] = std::exp(-0.5 * k * k / (sigma * sigma));
  }
  for (double& w : kernel) w /= total;

  const Shape& s = v.shape();
  Volume cur = v;
  std::vector<double> line;
  for (int axis = 0; axis < 3; ++axis) {
    const Index n = s[axis];
    const Index stride = axis == 0 ? s.ny * s.nx : (axis == 1 ? s.nx : 1);
    line.resize(static_cast<std::size_t>(n));
    for (Index c = 0; c < v.channels(); ++c) {
      for (Index base = 0; base < s.voxels(); ++base) {
        if (s.coord(base)[axis] != 0) continue;
        for (Index i = 0; i < n; ++i) line[i] = cur.at(c, base + i * stride);
        for (Index i = 0; i < n; ++i) {
          double acc = 0.0;
          for (int k = -radius; k <= radius; ++k) {
            const Index j = std::clamp<Index>(i + k, 0, n - 1);
            acc += kernel[static_cast<std::size_t>(k + radius)] * line[j];
          }
          cur.at(c, base + i * stride) = acc;
        }
      }
    }
  }
  return cur;
}

std::vector<ChannelKind> prediction_channel_kinds(Variant variant, bool with_cpv) {
  std::vector<ChannelKind> kinds;
  if (variant == Variant::kSdt) {
    kinds.push_back(ChannelKind::kSigned);
  } else {
    kinds.assign(static_cast<std::size_t>(prediction_channels(variant)), ChannelKind::kProbability);
  }
  if (with_cpv) kinds.insert(kinds.end(), kCpvChannels, ChannelKind::kVector);
  return kinds;
}

Volume perturb_target(const Volume& bundle, const std::vector<ChannelKind>& kinds, double noise_sigma,
                      double smoothing_sigma, std::uint64_t rng_seed) {
  if (static_cast<Index>(kinds.size()) != bundle.channels()) {
    throw Error(ErrorCode::kWrongChannelCount, "one channel kind per bundle channel required");
  }
  if (!(noise_sigma >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "noise sigma must be >= 0");
  Volume out = bundle;
  if (noise_sigma > 0.0) {
    PortableRng rng(rng_seed);
    for (Index i = 0; i < out.size(); ++i) out.data()[i] += noise_sigma * rng.normal();
  }
  out = gaussian_smooth(out, smoothing_sigma);
  for (Index c = 0; c < out.channels(); ++c) {
    if (kinds[static_cast<std::size_t>(c)] == ChannelKind::kProbability) {
      out.channel(c) = out.channel(c).cwiseMax(0.0).cwiseMin(1.0);
    }
  }
  return out;
}

}  // namespace nucseg
