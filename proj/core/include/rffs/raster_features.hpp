#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "rffs/types.hpp"

namespace rffs {

inline constexpr std::size_t kRasterSize = 7;
inline constexpr std::size_t kNumStats = 10;
inline constexpr std::array<std::size_t, 3> kDefaultGroupSizes{16, 32, 128};

/// Cell centers of an h x w partition of a bbox, row-major (row i advances y).
struct RasterGrid {
  std::vector<XY> centers;
  BBox bbox;
  std::size_t h;
  std::size_t w;

  XY center(std::size_t i, std::size_t j) const { return centers[i * w + j]; }
};

struct CellIndex {
  std::size_t row = 0;
  std::size_t col = 0;

  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// The k xy-nearest points around a raster center, padded by cyclic
/// repetition when the cloud holds fewer than k points.
struct NeighborhoodGroup {
  CellIndex cell;
  std::size_t k = 0;
  std::vector<Point3> points;
};

/// Feature order follows the structural statistics table top to bottom.
enum class Stat : std::size_t {
  ChangeOfCurvature = 0,
  Omnivariance,
  Linearity,
  Eigenentropy,
  LocalDensity,
  Scattering2D,
  Linearity2D,
  Verticality,
  HeightRange,
  HeightVariance,
};

std::string_view stat_name(Stat s);

struct StructuralFeatureVector {
  double curvature = 0.0;       // C
  double omnivariance = 0.0;    // O
  double linearity = 0.0;       // L
  double eigenentropy = 0.0;    // A
  double density = 0.0;         // D
  double scattering_2d = 0.0;   // S2D
  double linearity_2d = 0.0;    // L2D
  double verticality = 0.0;     // V
  double height_range = 0.0;    // dZ
  double height_variance = 0.0; // var_z

  std::array<double, kNumStats> as_array() const;
  static StructuralFeatureVector from_array(const std::array<double, kNumStats>& a);
  double operator[](Stat s) const { return as_array()[static_cast<std::size_t>(s)]; }
};

/// Statistics for one (center, group size) pair, as fed to assembly.
struct GroupStats {
  CellIndex cell;
  std::size_t k = 0;
  StructuralFeatureVector stats;
};

/// channels x h x w tensor, row-major, f32 so it round-trips the tensor file
/// format exactly. Channel 10*s + f holds statistic f at scale index s.
struct FeatureMap {
  std::size_t channels = 0;
  std::size_t h = 0;
  std::size_t w = 0;
  std::vector<float> data;

  float& at(std::size_t c, std::size_t i, std::size_t j) { return data[(c * h + i) * w + j]; }
  float at(std::size_t c, std::size_t i, std::size_t j) const { return data[(c * h + i) * w + j]; }

  friend bool operator==(const FeatureMap&, const FeatureMap&) = default;
};

/// Throws InvalidGridSize when h or w is 0.
RasterGrid raster_centers(const BBox& bbox, std::size_t h = kRasterSize, std::size_t w = kRasterSize);

/// Throws EmptyCloud for an empty cloud and InvalidK for k = 0.
NeighborhoodGroup group_neighborhood(const PointCloud& cloud, XY center, std::size_t k,
                                     CellIndex cell = {});

/// One group per (center, k), row-major centers then ascending k.
std::vector<NeighborhoodGroup> multi_scale_group(
    const PointCloud& cloud, const RasterGrid& grid,
    std::span<const std::size_t> ks = kDefaultGroupSizes);

/// Population covariance spectrum of (x, y, z). v3 is oriented with
/// v3.z >= 0, or its first nonzero component positive when v3.z == 0.
EigenTriple covariance_eigen(std::span<const Point3> points);

/// Population covariance spectrum of the xy projection.
EigenPair2D eigen2d(std::span<const Point3> points);

/// Lower clamp on the eigenvalue product in the density denominator.
inline constexpr double kDensityProductFloor = 1e-12;

StructuralFeatureVector structural_stats(std::span<const Point3> points);
StructuralFeatureVector structural_stats(const NeighborhoodGroup& group);

/// Scatters per-group statistics into a (10 * |ks|) x h x w map. Throws
/// IncompleteStats when any (cell, k) is missing and ShapeMismatch on
/// out-of-range or duplicated entries.
FeatureMap assemble_feature_map(std::span<const GroupStats> stats, std::size_t h = kRasterSize,
                                std::size_t w = kRasterSize,
                                std::span<const std::size_t> ks = kDefaultGroupSizes);

/// Per-channel mean over all cells.
std::vector<double> pooled_features(const FeatureMap& map);

/// Raster centers, multi-scale grouping, statistics and assembly for one
/// normalized segment whose frame is centered on the label.
FeatureMap extract_feature_map(const PointCloud& normalized_segment, const BBox& frame,
                               std::size_t raster = kRasterSize,
                               std::span<const std::size_t> ks = kDefaultGroupSizes);

}  // namespace rffs
