#pragma once

#include <array>
#include <cstdint>

#include <Eigen/Core>

#include "nucseg/error.hpp"

namespace nucseg {

using Index = Eigen::Index;

/// Continuous (z, y, x) position in voxel units.
using Point3 = Eigen::Vector3d;

/// Integer (z, y, x) voxel coordinate.
using Coord3 = Eigen::Matrix<Index, 3, 1>;

/// Physical edge lengths (micrometers) of one voxel.
struct VoxelSize {
  double dz = 1.0;
  double dy = 1.0;
  double dx = 1.0;

  bool operator==(const VoxelSize&) const = default;
  bool valid() const { return dz > 0.0 && dy > 0.0 && dx > 0.0; }
};

struct Shape {
  Index nz = 0;
  Index ny = 0;
  Index nx = 0;

  bool operator==(const Shape&) const = default;
  Index voxels() const { return nz * ny * nx; }
  Index operator[](int axis) const { return axis == 0 ? nz : (axis == 1 ? ny : nx); }

  bool contains(Index z, Index y, Index x) const {
    return z >= 0 && y >= 0 && x >= 0 && z < nz && y < ny && x < nx;
  }
  bool contains(const Coord3& c) const { return contains(c[0], c[1], c[2]); }

  Index linear(Index z, Index y, Index x) const { return (z * ny + y) * nx + x; }
  Index linear(const Coord3& c) const { return linear(c[0], c[1], c[2]); }

  Coord3 coord(Index linear_index) const {
    const Index x = linear_index % nx;
    const Index yz = linear_index / nx;
    return {yz / ny, yz % ny, x};
  }
};

/// Face-adjacent neighbour offsets in a fixed order: -z, +z, -y, +y, -x, +x.
inline constexpr std::array<std::array<int, 3>, 6> kFaceOffsets{{
    {-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}, {0, 0, -1}, {0, 0, 1}}};

/// Dense multi-channel 3D grid, stored channel-major then C-order (c, z, y, x).
template <typename Scalar>
class DenseVolume {
 public:
  using Storage = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  DenseVolume() = default;

  explicit DenseVolume(Shape shape, Index channels = 1, VoxelSize voxel_size = {},
                       Scalar fill = Scalar(0))
      : shape_(shape), channels_(channels), voxel_size_(voxel_size) {
    if (shape.nz < 0 || shape.ny < 0 || shape.nx < 0 || channels < 1) {
      throw Error(ErrorCode::kInvalidArgument, "volume extents must be non-negative with >= 1 channel");
    }
    if (!voxel_size.valid()) {
      throw Error(ErrorCode::kInvalidArgument, "voxel size must be strictly positive");
    }
    data_ = Storage::Constant(channels * shape.voxels(), fill);
  }

  const Shape& shape() const { return shape_; }
  Index channels() const { return channels_; }
  const VoxelSize& voxel_size() const { return voxel_size_; }
  void set_voxel_size(VoxelSize vs) { voxel_size_ = vs; }
  Index voxels() const { return shape_.voxels(); }
  Index size() const { return data_.size(); }

  Storage& data() { return data_; }
  const Storage& data() const { return data_; }

  auto channel(Index c) { return data_.segment(c * voxels(), voxels()); }
  auto channel(Index c) const { return data_.segment(c * voxels(), voxels()); }

  Scalar& operator()(Index c, Index z, Index y, Index x) {
    return data_[c * voxels() + shape_.linear(z, y, x)];
  }
  Scalar operator()(Index c, Index z, Index y, Index x) const {
    return data_[c * voxels() + shape_.linear(z, y, x)];
  }
  Scalar& operator()(Index z, Index y, Index x) { return data_[shape_.linear(z, y, x)]; }
  Scalar operator()(Index z, Index y, Index x) const { return data_[shape_.linear(z, y, x)]; }

  /// Value of channel c at linear voxel index v.
  Scalar& at(Index c, Index v) { return data_[c * voxels() + v]; }
  Scalar at(Index c, Index v) const { return data_[c * voxels() + v]; }

  bool same_geometry(const DenseVolume& other) const { return shape_ == other.shape_; }

  bool operator==(const DenseVolume& other) const {
    return shape_ == other.shape_ && channels_ == other.channels_ &&
           voxel_size_ == other.voxel_size_ && (data_ == other.data_).all();
  }

 private:
  Shape shape_{};
  Index channels_ = 1;
  VoxelSize voxel_size_{};
  Storage data_{};
};

/// Scalar or multi-channel real-valued volume (images, predictions, targets).
using Volume = DenseVolume<double>;
/// Instance labels; 0 is background.
using LabelVolume = DenseVolume<std::int32_t>;
/// Binary mask with values in {0, 1}.
using Mask = DenseVolume<std::uint8_t>;

template <typename A, typename B>
void require_same_shape(const DenseVolume<A>& a, const DenseVolume<B>& b, const char* what) {
  if (!(a.shape() == b.shape())) {
    throw Error(ErrorCode::kShapeMismatch, what);
  }
}

/// Channels [first, first + count) of a volume as a new volume.
template <typename Scalar>
DenseVolume<Scalar> slice_channels(const DenseVolume<Scalar>& v, Index first, Index count) {
  if (first < 0 || count < 1 || first + count > v.channels()) {
    throw Error(ErrorCode::kWrongChannelCount, "channel slice out of range");
  }
  DenseVolume<Scalar> out(v.shape(), count, v.voxel_size());
  out.data() = v.data().segment(first * v.voxels(), count * v.voxels());
  return out;
}

/// Stacks volumes of identical shape along the channel axis.
template <typename Scalar>
DenseVolume<Scalar> concat_channels(const DenseVolume<Scalar>& a, const DenseVolume<Scalar>& b) {
  require_same_shape(a, b, "concat_channels: shapes differ");
  DenseVolume<Scalar> out(a.shape(), a.channels() + b.channels(), a.voxel_size());
  out.data() << a.data(), b.data();
  return out;
}

/// Casts element type, keeping geometry.
template <typename To, typename From>
DenseVolume<To> cast_volume(const DenseVolume<From>& v) {
  DenseVolume<To> out(v.shape(), v.channels(), v.voxel_size());
  out.data() = v.data().template cast<To>();
  return out;
}

}  // namespace nucseg
