#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "nucseg/detection.hpp"
#include "nucseg/volume.hpp"

namespace nucseg::io {

// Volume file layout (all little-endian):
//   bytes  0..3   magic "V3DR"
//          4..7   u32 version (1)
//          8..11  u32 dtype (0 = u8, 1 = u16, 2 = i32, 3 = f32)
//         12..27  u32 channels, nz, ny, nx
//         28..51  f64 voxel size dz, dy, dx
//         52..    payload, C-order (c, z, y, x), x fastest

enum class Dtype : std::uint32_t { kU8 = 0, kU16 = 1, kI32 = 2, kF32 = 3 };

struct VolumeFileHeader {
  std::uint32_t version = 1;
  Dtype dtype = Dtype::kF32;
  std::uint32_t channels = 1;
  std::uint32_t nz = 0;
  std::uint32_t ny = 0;
  std::uint32_t nx = 0;
  VoxelSize voxel_size{};
};

inline constexpr std::size_t kHeaderBytes = 52;

std::size_t dtype_bytes(Dtype dtype);
bool is_integer(Dtype dtype);

/// Integer-dtype files load as LabelVolume, f32 files as Volume.
using AnyVolume = std::variant<Volume, LabelVolume>;

std::vector<std::uint8_t> encode_volume(const Volume& v, Dtype dtype = Dtype::kF32);
std::vector<std::uint8_t> encode_volume(const LabelVolume& v, Dtype dtype = Dtype::kI32);
AnyVolume decode_volume(const std::vector<std::uint8_t>& bytes);
VolumeFileHeader decode_header(const std::vector<std::uint8_t>& bytes);

void write_volume(const std::filesystem::path& path, const Volume& v, Dtype dtype = Dtype::kF32);
void write_volume(const std::filesystem::path& path, const LabelVolume& v, Dtype dtype = Dtype::kI32);
AnyVolume read_volume(const std::filesystem::path& path);

/// Any dtype, converted to double.
Volume read_real_volume(const std::filesystem::path& path);
/// Integer dtypes only; single channel.
LabelVolume read_label_volume(const std::filesystem::path& path);

// Detections: CSV with header `z,y,x,score`, 17 significant digits, rows by descending score.
std::string format_detections(const DetectionList& dets);
DetectionList parse_detections(const std::string& text);
void write_detections(const std::filesystem::path& path, const DetectionList& dets);
DetectionList read_detections(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);
std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

}  // namespace nucseg::io
