#include "rffs/segment_sampler.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "rffs/error.hpp"

namespace rffs {

BBox segment_bbox(XY center, double side) {
  if (!(side > 0.0) || !std::isfinite(side)) {
    std::ostringstream msg;
    msg << "segment side " << side << " must be positive";
    throw Error(ErrorCode::InvalidSide, msg.str());
  }
  const double half = 0.5 * side;
  return BBox::make(center.x - half, center.y - half, center.x + half, center.y + half);
}

SamplingGrid sampling_grid(const BBox& bbox, std::size_t n) {
  if (n < 2) {
    throw Error(ErrorCode::InvalidGridSize, "sampling grid needs at least 2 points per side");
  }
  const double step_x = bbox.width() / static_cast<double>(n - 1);
  const double step_y = bbox.height() / static_cast<double>(n - 1);

  SamplingGrid grid{{}, bbox, n};
  grid.coords.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    // Pin the last row/column to the bbox edge so rounding never leaves it.
    const double y = (i == n - 1) ? bbox.max_y() : bbox.min_y() + static_cast<double>(i) * step_y;
    for (std::size_t j = 0; j < n; ++j) {
      const double x =
          (j == n - 1) ? bbox.max_x() : bbox.min_x() + static_cast<double>(j) * step_x;
      grid.coords.push_back({x, y});
    }
  }
  return grid;
}

PointCloud sample_cloud(const KdTree& tree, const PointCloud& source, const SamplingGrid& grid) {
  if (tree.size() == 0 || source.empty()) {
    throw Error(ErrorCode::EmptyCloud, "sampling from an empty tree");
  }
  if (tree.source_size() != source.size()) {
    throw Error(ErrorCode::ShapeMismatch, "k-d tree was built over a different cloud");
  }
  PointCloud out;
  out.normalized = source.normalized;
  out.points.reserve(grid.coords.size());
  for (const XY& c : grid.coords) out.points.push_back(source[tree.nearest(c)]);
  return out;
}

PointCloud normalize_cloud(const PointCloud& cloud, XY center, double heading_deg) {
  if (cloud.empty()) throw Error(ErrorCode::EmptyCloud, "normalizing an empty cloud");
  if (!cloud.normalized) {
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const double v = cloud[i].intensity;
      if (!(v >= 0.0 && v <= 255.0)) {
        std::ostringstream msg;
        msg << "point " << i << " intensity " << v << " outside [0, 255]";
        throw Error(ErrorCode::IntensityRange, msg.str());
      }
    }
  }

  const double theta = heading_deg * std::numbers::pi / 180.0;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double z_median = median_z(cloud);

  PointCloud out;
  out.normalized = true;
  out.points.reserve(cloud.size());
  for (const Point3& p : cloud.points) {
    const double tx = p.x - center.x;
    const double ty = p.y - center.y;
    Point3 q;
    q.x = c * tx - s * ty;
    q.y = s * tx + c * ty;
    q.z = p.z - z_median;
    q.intensity = cloud.normalized ? p.intensity : p.intensity / 255.0;
    out.points.push_back(q);
  }
  return out;
}

}  // namespace rffs
