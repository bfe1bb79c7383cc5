#include "nucseg/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

namespace nucseg::io {
namespace {

constexpr char kMagic[4] = {'V', '3', 'D', 'R'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

std::uint32_t checked_extent(Index n, const char* what) {
  if (n < 1 || n > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::kInvalidArgument, std::string(what) + " must be in [1, 2^32)");
  }
  return static_cast<std::uint32_t>(n);
}

template <typename Scalar>
std::vector<std::uint8_t> encode_any(const DenseVolume<Scalar>& v, Dtype dtype) {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + static_cast<std::size_t>(v.size()) * dtype_bytes(dtype));
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_u32(out, 1);
  put_u32(out, static_cast<std::uint32_t>(dtype));
  put_u32(out, checked_extent(v.channels(), "channels"));
  put_u32(out, checked_extent(v.shape().nz, "nz"));
  put_u32(out, checked_extent(v.shape().ny, "ny"));
  put_u32(out, checked_extent(v.shape().nx, "nx"));
  put_u64(out, std::bit_cast<std::uint64_t>(v.voxel_size().dz));
  put_u64(out, std::bit_cast<std::uint64_t>(v.voxel_size().dy));
  put_u64(out, std::bit_cast<std::uint64_t>(v.voxel_size().dx));

  for (Index i = 0; i < v.size(); ++i) {
    const double value = static_cast<double>(v.data()[i]);
    auto require_int = [&](double lo, double hi) {
      if (!(value >= lo && value <= hi) || value != std::floor(value)) {
        throw Error(ErrorCode::kValueOutOfRange, "value not representable in the requested dtype");
      }
    };
    switch (dtype) {
      case Dtype::kU8:
        require_int(0, 255);
        out.push_back(static_cast<std::uint8_t>(value));
        break;
      case Dtype::kU16: {
        require_int(0, 65535);
        const auto u = static_cast<std::uint16_t>(value);
        out.push_back(static_cast<std::uint8_t>(u));
        out.push_back(static_cast<std::uint8_t>(u >> 8));
        break;
      }
      case Dtype::kI32:
        require_int(std::numeric_limits<std::int32_t>::min(), std::numeric_limits<std::int32_t>::max());
        put_u32(out, static_cast<std::uint32_t>(static_cast<std::int32_t>(value)));
        break;
      case Dtype::kF32: {
        if (!std::isfinite(value)) throw Error(ErrorCode::kValueOutOfRange, "non-finite value");
        const auto f = static_cast<float>(value);
        if (!std::isfinite(f)) throw Error(ErrorCode::kValueOutOfRange, "value overflows f32");
        put_u32(out, std::bit_cast<std::uint32_t>(f));
        break;
      }
    }
  }
  return out;
}

template <typename Scalar>
DenseVolume<Scalar> decode_payload(const VolumeFileHeader& h, const std::uint8_t* p) {
  DenseVolume<Scalar> v(Shape{h.nz, h.ny, h.nx}, h.channels, h.voxel_size);
  const std::size_t width = dtype_bytes(h.dtype);
  for (Index i = 0; i < v.size(); ++i, p += width) {
    switch (h.dtype) {
      case Dtype::kU8: v.data()[i] = static_cast<Scalar>(p[0]); break;
      case Dtype::kU16: v.data()[i] = static_cast<Scalar>(p[0] | (p[1] << 8)); break;
      case Dtype::kI32: v.data()[i] = static_cast<Scalar>(static_cast<std::int32_t>(get_u32(p))); break;
      case Dtype::kF32: {
        const float f = std::bit_cast<float>(get_u32(p));
        if (!std::isfinite(f)) throw Error(ErrorCode::kValueOutOfRange, "non-finite value in payload");
        v.data()[i] = static_cast<Scalar>(f);
        break;
      }
    }
  }
  return v;
}

}  // namespace

std::size_t dtype_bytes(Dtype dtype) {
  switch (dtype) {
    case Dtype::kU8: return 1;
    case Dtype::kU16: return 2;
    case Dtype::kI32: return 4;
    case Dtype::kF32: return 4;
  }
  throw Error(ErrorCode::kUnsupportedDtype, "unknown dtype");
}

bool is_integer(Dtype dtype) { return dtype != Dtype::kF32; }

std::vector<std::uint8_t> encode_volume(const Volume& v, Dtype dtype) { return encode_any(v, dtype); }
std::vector<std::uint8_t> encode_volume(const LabelVolume& v, Dtype dtype) { return encode_any(v, dtype); }

VolumeFileHeader decode_header(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::kBadMagic, "expected V3DR");
  }
  if (bytes.size() < kHeaderBytes) throw Error(ErrorCode::kTruncatedHeader, "file shorter than header");
  const std::uint8_t* p = bytes.data();
  VolumeFileHeader h;
  h.version = get_u32(p + 4);
  if (h.version != 1) throw Error(ErrorCode::kUnsupportedVersion, "version " + std::to_string(h.version));
  const std::uint32_t dtype = get_u32(p + 8);
  if (dtype > 3) throw Error(ErrorCode::kUnsupportedDtype, "dtype code " + std::to_string(dtype));
  h.dtype = static_cast<Dtype>(dtype);
  h.channels = get_u32(p + 12);
  h.nz = get_u32(p + 16);
  h.ny = get_u32(p + 20);
  h.nx = get_u32(p + 24);
  h.voxel_size = {std::bit_cast<double>(get_u64(p + 28)), std::bit_cast<double>(get_u64(p + 36)),
                  std::bit_cast<double>(get_u64(p + 44))};
  if (h.channels == 0 || h.nz == 0 || h.ny == 0 || h.nx == 0) {
    throw Error(ErrorCode::kInvalidArgument, "header counts must be positive");
  }
  if (!h.voxel_size.valid() || !std::isfinite(h.voxel_size.dz) || !std::isfinite(h.voxel_size.dy) ||
      !std::isfinite(h.voxel_size.dx)) {
    throw Error(ErrorCode::kInvalidArgument, "voxel size must be finite and positive");
  }
  return h;
}

AnyVolume decode_volume(const std::vector<std::uint8_t>& bytes) {
  const VolumeFileHeader h = decode_header(bytes);
  const unsigned __int128 expected = static_cast<unsigned __int128>(h.channels) * h.nz * h.ny * h.nx *
                                     dtype_bytes(h.dtype);
  const std::size_t payload = bytes.size() - kHeaderBytes;
  if (payload < expected) throw Error(ErrorCode::kTruncatedPayload, "payload shorter than header declares");
  if (payload > expected) throw Error(ErrorCode::kTrailingData, "payload longer than header declares");
  const std::uint8_t* p = bytes.data() + kHeaderBytes;
  if (is_integer(h.dtype)) return decode_payload<std::int32_t>(h, p);
  return decode_payload<double>(h, p);
}

void write_volume(const std::filesystem::path& path, const Volume& v, Dtype dtype) {
  write_bytes(path, encode_volume(v, dtype));
}

void write_volume(const std::filesystem::path& path, const LabelVolume& v, Dtype dtype) {
  write_bytes(path, encode_volume(v, dtype));
}

AnyVolume read_volume(const std::filesystem::path& path) { return decode_volume(read_bytes(path)); }

Volume read_real_volume(const std::filesystem::path& path) {
  AnyVolume any = read_volume(path);
  if (auto* labels = std::get_if<LabelVolume>(&any)) return cast_volume<double>(*labels);
  return std::get<Volume>(std::move(any));
}

LabelVolume read_label_volume(const std::filesystem::path& path) {
  AnyVolume any = read_volume(path);
  auto* labels = std::get_if<LabelVolume>(&any);
  if (labels == nullptr) throw Error(ErrorCode::kUnsupportedDtype, path.string() + ": labels need an integer dtype");
  if (labels->channels() != 1) throw Error(ErrorCode::kWrongChannelCount, path.string() + ": labels must be single-channel");
  if ((labels->data() < 0).any()) throw Error(ErrorCode::kValueOutOfRange, path.string() + ": negative label");
  return std::move(*labels);
}

std::string format_detections(const DetectionList& dets) {
  DetectionList sorted = dets;
  sort_by_score(sorted);
  std::string out = "z,y,x,score\n";
  char buf[128];
  for (const Detection& d : sorted) {
    if (!std::isfinite(d.score) || !d.position.allFinite()) {
      throw Error(ErrorCode::kValueOutOfRange, "detections must be finite");
    }
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", d.position[0], d.position[1], d.position[2],
                  d.score);
    out += buf;
  }
  return out;
}

DetectionList parse_detections(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  DetectionList dets;
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::kMalformedRow, "line " + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != "z,y,x,score") fail("expected header z,y,x,score");
      continue;
    }
    if (line.empty()) continue;
    double fields[4];
    std::size_t start = 0;
    for (int f = 0; f < 4; ++f) {
      const std::size_t end = line.find(',', start);
      if ((f < 3) != (end != std::string::npos)) fail("expected 4 comma-separated fields");
      const std::string token = line.substr(start, f < 3 ? end - start : std::string::npos);
      char* parse_end = nullptr;
      fields[f] = std::strtod(token.c_str(), &parse_end);
      if (token.empty() || parse_end != token.c_str() + token.size() || !std::isfinite(fields[f])) {
        fail("non-numeric field '" + token + "'");
      }
      start = end + 1;
    }
    dets.push_back({Point3(fields[0], fields[1], fields[2]), fields[3]});
  }
  if (line_no == 0) {
    line_no = 1;
    fail("missing header");
  }
  return dets;
}

void write_detections(const std::filesystem::path& path, const DetectionList& dets) {
  write_text(path, format_detections(dets));
}

DetectionList read_detections(const std::filesystem::path& path) { return parse_detections(read_text(path)); }

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  return {bytes.begin(), bytes.end()};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  write_bytes(path, {text.begin(), text.end()});
}

}  // namespace nucseg::io
