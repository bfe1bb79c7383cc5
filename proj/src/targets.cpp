#include "nucseg/targets.hpp"

#include <cmath>
#include <limits>

#include "nucseg/edt.hpp"
#include "nucseg/morphology.hpp"

namespace nucseg {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kSdt: return "sdt";
    case Variant::kThreeLabel: return "3label";
    case Variant::kAffinities: return "affinities";
    case Variant::kGauss: return "gauss";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  if (name == "sdt") return Variant::kSdt;
  if (name == "3label") return Variant::kThreeLabel;
  if (name == "affinities") return Variant::kAffinities;
  if (name == "gauss") return Variant::kGauss;
  throw Error(ErrorCode::kInvalidArgument, "unknown variant '" + std::string(name) + "'");
}

Index target_channels(Variant v) { return v == Variant::kAffinities ? 4 : 1; }

Index prediction_channels(Variant v) {
  switch (v) {
    case Variant::kThreeLabel: return 3;
    case Variant::kAffinities: return 4;
    default: return 1;
  }
}

Mask boundary_voxels(const LabelVolume& labels) {
  const Shape& s = labels.shape();
  Mask out(s, 1, labels.voxel_size());
  for (Index z = 0; z < s.nz; ++z) {
    for (Index y = 0; y < s.ny; ++y) {
      for (Index x = 0; x < s.nx; ++x) {
        const std::int32_t id = labels(z, y, x);
        if (id <= 0) continue;
        for (const auto& o : kFaceOffsets) {
          const Index nz = z + o[0], ny = y + o[1], nx = x + o[2];
          if (!s.contains(nz, ny, nx) || labels(nz, ny, nx) != id) {
            out(z, y, x) = 1;
            break;
          }
        }
      }
    }
  }
  return out;
}

Volume boundary_distance(const LabelVolume& labels, bool anisotropic) {
  Volume d = squared_distance_transform(boundary_voxels(labels), anisotropic);
  d.data() = d.data().sqrt();
  return d;
}

Volume encode_sdt(const LabelVolume& labels, double scale, bool anisotropic) {
  if (!(scale > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tanh scale must be > 0");
  const Volume dist = boundary_distance(labels, anisotropic);
  Volume out(labels.shape(), 1, labels.voxel_size());
  for (Index v = 0; v < out.voxels(); ++v) {
    const double d = dist.at(0, v);
    if (std::isinf(d)) {
      out.at(0, v) = 1.0;
      continue;
    }
    const double signed_d = labels.at(0, v) > 0 ? -d : d;
    out.at(0, v) = std::tanh(signed_d / scale);
  }
  return out;
}

Volume encode_three_label(const LabelVolume& labels) {
  const Mask boundary = boundary_voxels(labels);
  Volume out(labels.shape(), 1, labels.voxel_size());
  for (Index v = 0; v < out.voxels(); ++v) {
    if (labels.at(0, v) <= 0) continue;
    out.at(0, v) = boundary.at(0, v) ? kBoundary : kInterior;
  }
  return out;
}

Volume encode_affinities(const LabelVolume& labels) {
  const LabelVolume eroded = erode_instances(labels, 1);
  const Shape& s = labels.shape();
  Volume out(s, 4, labels.voxel_size());
  for (Index z = 0; z < s.nz; ++z) {
    for (Index y = 0; y < s.ny; ++y) {
      for (Index x = 0; x < s.nx; ++x) {
        const std::int32_t id = eroded(z, y, x);
        if (id <= 0) continue;
        out(3, z, y, x) = 1.0;
        if (z + 1 < s.nz && eroded(z + 1, y, x) == id) out(0, z, y, x) = 1.0;
        if (y + 1 < s.ny && eroded(z, y + 1, x) == id) out(1, z, y, x) = 1.0;
        if (x + 1 < s.nx && eroded(z, y, x + 1) == id) out(2, z, y, x) = 1.0;
      }
    }
  }
  return out;
}

Volume encode_cpv(const LabelVolume& labels) {
  const auto moments = instance_moments(labels);
  const Shape& s = labels.shape();
  Volume out(s, kCpvChannels, labels.voxel_size());
  for (Index z = 0; z < s.nz; ++z) {
    for (Index y = 0; y < s.ny; ++y) {
      for (Index x = 0; x < s.nx; ++x) {
        const std::int32_t id = labels(z, y, x);
        if (id <= 0) continue;
        const Point3 v = moments.at(id).center() -
                         Point3(static_cast<double>(z), static_cast<double>(y), static_cast<double>(x));
        for (int c = 0; c < 3; ++c) out(c, z, y, x) = v[c];
      }
    }
  }
  return out;
}

Volume encode_gauss(const LabelVolume& labels, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::kInvalidArgument, "sigma must be > 0");
  std::vector<Point3> centers;
  for (const auto& [id, m] : instance_moments(labels)) centers.push_back(m.center());
  const double inv_two_sigma2 = 1.0 / (2.0 * sigma * sigma);
  const Shape& s = labels.shape();
  Volume out(s, 1, labels.voxel_size());
  for (Index z = 0; z < s.nz; ++z) {
    for (Index y = 0; y < s.ny; ++y) {
      for (Index x = 0; x < s.nx; ++x) {
        const Point3 p(static_cast<double>(z), static_cast<double>(y), static_cast<double>(x));
        double best_d2 = std::numeric_limits<double>::infinity();
        for (const Point3& c : centers) best_d2 = std::min(best_d2, (p - c).squaredNorm());
        if (!centers.empty()) out(z, y, x) = std::exp(-best_d2 * inv_two_sigma2);
      }
    }
  }
  return out;
}

Volume encode_bundle(const LabelVolume& labels, Variant variant, bool with_cpv, const TargetParams& params) {
  Volume main;
  switch (variant) {
    case Variant::kSdt: main = encode_sdt(labels, params.tanh_scale, params.anisotropic_edt); break;
    case Variant::kThreeLabel: main = encode_three_label(labels); break;
    case Variant::kAffinities: main = encode_affinities(labels); break;
    case Variant::kGauss: main = encode_gauss(labels, params.gauss_sigma); break;
  }
  if (!with_cpv) return main;
  return concat_channels(main, encode_cpv(labels));
}

Volume one_hot_three_label(const Volume& classes) {
  if (classes.channels() != 1) throw Error(ErrorCode::kWrongChannelCount, "class volume must be single-channel");
  Volume out(classes.shape(), 3, classes.voxel_size());
  for (Index v = 0; v < classes.voxels(); ++v) {
    const double c = classes.at(0, v);
    if (!is_three_label_class(c)) {
      throw Error(ErrorCode::kInvalidClass, "class value must be 0, 1 or 2");
    }
    out.at(static_cast<Index>(c), v) = 1.0;
  }
  return out;
}

Volume bundle_as_prediction(const Volume& bundle, Variant variant) {
  const Index main = target_channels(variant);
  if (bundle.channels() != main && bundle.channels() != main + kCpvChannels) {
    throw Error(ErrorCode::kWrongChannelCount, "bundle channel count does not match variant");
  }
  if (variant != Variant::kThreeLabel) return bundle;
  Volume expanded = one_hot_three_label(slice_channels(bundle, 0, 1));
  if (bundle.channels() == main) return expanded;
  return concat_channels(expanded, slice_channels(bundle, 1, kCpvChannels));
}

}  // namespace nucseg
