#pragma once

#include <cstddef>
#include <vector>

#include "rffs/spatial_index.hpp"
#include "rffs/types.hpp"

namespace rffs {

inline constexpr double kSegmentSide = 200.0;
inline constexpr std::size_t kSamplingGridSize = 80;

/// n x n endpoint-inclusive lattice over a bbox, row-major (row i advances y,
/// column j advances x).
struct SamplingGrid {
  std::vector<XY> coords;
  BBox bbox;
  std::size_t n;
};

/// Square of the given side centered on center. Throws InvalidSide when
/// side <= 0.
BBox segment_bbox(XY center, double side = kSegmentSide);

/// Throws InvalidGridSize when n < 2.
SamplingGrid sampling_grid(const BBox& bbox, std::size_t n = kSamplingGridSize);

/// One source point per grid coordinate: the xy-nearest retained point.
/// Duplicates are kept; output follows grid order.
PointCloud sample_cloud(const KdTree& tree, const PointCloud& source, const SamplingGrid& grid);

/// Translates xy by -center, rotates counter-clockwise by heading_deg so the
/// travel direction points to +y, subtracts the median z and scales intensity
/// by 1/255. An already-normalized input keeps its intensities unscaled.
/// Throws IntensityRange for raw intensities outside [0, 255].
PointCloud normalize_cloud(const PointCloud& cloud, XY center, double heading_deg);

}  // namespace rffs
