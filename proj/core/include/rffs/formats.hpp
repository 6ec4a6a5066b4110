#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rffs/raster_features.hpp"
#include "rffs/spatial_index.hpp"
#include "rffs/speed_head.hpp"
#include "rffs/types.hpp"

// On-disk formats. All binary formats are little-endian regardless of host.
//
// Tile file (PCT1):
//   "PCT1" | u16 version=1 | u16 reserved=0 | u64 count |
//   count x (f64 x, f64 y, f64 z, f32 intensity, u32 pad=0)
//   Total length 16 + 32 * count bytes.
//
// Tensor file (FTS1):
//   "FTS1" | u16 version=1 | u16 ndim | ndim x u32 dims | prod(dims) x f32
//   Payload row-major.
namespace rffs {

inline constexpr std::size_t kTileHeaderBytes = 16;
inline constexpr std::size_t kTileRecordBytes = 32;

std::vector<std::uint8_t> encode_tile(const PointCloud& cloud);

/// Throws FormatError on a bad header and TruncatedFile when the payload is
/// shorter than the declared count.
PointCloud decode_tile(std::span<const std::uint8_t> bytes);

void write_tile(const std::filesystem::path& path, const PointCloud& cloud);
PointCloud read_tile(const std::filesystem::path& path);

struct Tensor {
  std::vector<std::uint32_t> dims;
  std::vector<float> data;

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

std::vector<std::uint8_t> encode_tensor(const Tensor& tensor);
Tensor decode_tensor(std::span<const std::uint8_t> bytes);

void write_tensor(const std::filesystem::path& path, const Tensor& tensor);
Tensor read_tensor(const std::filesystem::path& path);

Tensor to_tensor(const FeatureMap& map);
/// Throws ShapeMismatch unless the tensor is 3-dimensional.
FeatureMap to_feature_map(const Tensor& tensor);

/// JSON lines of {"id", "x", "y", "heading_deg", "speed_mph"}. class_bin is
/// derived on read. Throws FormatError with the offending line number.
std::vector<SpeedSample> parse_labels(const std::string& text);
std::vector<SpeedSample> read_labels(const std::filesystem::path& path);
void write_labels(const std::filesystem::path& path, std::span<const SpeedSample> labels);

/// JSON array of {"tile_id", "min_x", "min_y", "max_x", "max_y", "path"}.
/// Relative tile paths are resolved against base_dir.
std::vector<TileRecord> parse_manifest(const std::string& text,
                                       const std::filesystem::path& base_dir = {});
std::vector<TileRecord> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, std::span<const TileRecord> records);

/// {"k": 79, "f": 31, "mean": [...], "std": [...], "weights": [K x 31]}; f
/// counts the bias column.
std::string model_to_json(const LogisticModel& model);
LogisticModel model_from_json(const std::string& text);
void write_model(const std::filesystem::path& path, const LogisticModel& model);
LogisticModel read_model(const std::filesystem::path& path);

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
std::string read_text(const std::filesystem::path& path);
void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace rffs
