#include "rffs/raster_features.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rffs/error.hpp"
#include "rffs/spatial_index.hpp"

namespace rffs {

std::string_view stat_name(Stat s) {
  switch (s) {
    case Stat::ChangeOfCurvature: return "C";
    case Stat::Omnivariance: return "O";
    case Stat::Linearity: return "L";
    case Stat::Eigenentropy: return "A";
    case Stat::LocalDensity: return "D";
    case Stat::Scattering2D: return "S2D";
    case Stat::Linearity2D: return "L2D";
    case Stat::Verticality: return "V";
    case Stat::HeightRange: return "dZ";
    case Stat::HeightVariance: return "var_z";
  }
  return "?";
}

std::array<double, kNumStats> StructuralFeatureVector::as_array() const {
  return {curvature,     omnivariance, linearity,   eigenentropy, density,
          scattering_2d, linearity_2d, verticality, height_range, height_variance};
}

StructuralFeatureVector StructuralFeatureVector::from_array(const std::array<double, kNumStats>& a) {
  return {a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7], a[8], a[9]};
}

RasterGrid raster_centers(const BBox& bbox, std::size_t h, std::size_t w) {
  if (h == 0 || w == 0) throw Error(ErrorCode::InvalidGridSize, "raster grid needs h, w >= 1");
  const double pitch_x = bbox.width() / static_cast<double>(w);
  const double pitch_y = bbox.height() / static_cast<double>(h);
  RasterGrid grid{{}, bbox, h, w};
  grid.centers.reserve(h * w);
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      grid.centers.push_back({bbox.min_x() + (static_cast<double>(j) + 0.5) * pitch_x,
                              bbox.min_y() + (static_cast<double>(i) + 0.5) * pitch_y});
    }
  }
  return grid;
}

namespace {

// Ascending, validated copy of the requested group sizes.
std::vector<std::size_t> sorted_group_sizes(std::span<const std::size_t> ks) {
  if (ks.empty()) throw Error(ErrorCode::InvalidK, "no group sizes given");
  std::vector<std::size_t> sizes(ks.begin(), ks.end());
  std::sort(sizes.begin(), sizes.end());
  if (sizes.front() == 0) throw Error(ErrorCode::InvalidK, "group size must be positive");
  if (std::adjacent_find(sizes.begin(), sizes.end()) != sizes.end()) {
    throw Error(ErrorCode::InvalidK, "group sizes must be distinct");
  }
  return sizes;
}

NeighborhoodGroup make_group(const PointCloud& cloud, const std::vector<std::size_t>& nearest,
                             std::size_t k, CellIndex cell) {
  NeighborhoodGroup group{cell, k, {}};
  group.points.reserve(k);
  const std::size_t available = std::min(k, nearest.size());
  for (std::size_t t = 0; t < k; ++t) group.points.push_back(cloud[nearest[t % available]]);
  return group;
}

}  // namespace

NeighborhoodGroup group_neighborhood(const PointCloud& cloud, XY center, std::size_t k,
                                     CellIndex cell) {
  if (cloud.empty()) throw Error(ErrorCode::EmptyCloud, "grouping over an empty cloud");
  if (k == 0) throw Error(ErrorCode::InvalidK, "group size must be positive");
  const KdTree tree(cloud, 1.0, 0);
  return make_group(cloud, tree.k_nearest(center, k), k, cell);
}

std::vector<NeighborhoodGroup> multi_scale_group(const PointCloud& cloud, const RasterGrid& grid,
                                                 std::span<const std::size_t> ks) {
  if (cloud.empty()) throw Error(ErrorCode::EmptyCloud, "grouping over an empty cloud");
  const auto sizes = sorted_group_sizes(ks);

  // Neighbor lists are totally ordered, so the k-prefix of the largest query
  // is exactly the k-nearest list.
  const KdTree tree(cloud, 1.0, 0);
  std::vector<NeighborhoodGroup> groups;
  groups.reserve(grid.centers.size() * sizes.size());
  for (std::size_t i = 0; i < grid.h; ++i) {
    for (std::size_t j = 0; j < grid.w; ++j) {
      const auto nearest = tree.k_nearest(grid.center(i, j), sizes.back());
      for (std::size_t k : sizes) groups.push_back(make_group(cloud, nearest, k, {i, j}));
    }
  }
  return groups;
}

namespace {

// Population covariance, accumulated relative to the first point so that
// identical points give an exactly zero matrix.
Eigen::Matrix3d covariance(std::span<const Point3> points) {
  const Point3& origin = points.front();
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const Point3& p : points) mean += Eigen::Vector3d(p.x - origin.x, p.y - origin.y, p.z - origin.z);
  const double n = static_cast<double>(points.size());
  mean /= n;

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const Point3& p : points) {
    const Eigen::Vector3d d =
        Eigen::Vector3d(p.x - origin.x, p.y - origin.y, p.z - origin.z) - mean;
    cov.noalias() += d * d.transpose();
  }
  return cov / n;
}

}  // namespace

EigenTriple covariance_eigen(std::span<const Point3> points) {
  if (points.empty()) throw Error(ErrorCode::EmptyCloud, "eigen decomposition of no points");
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(covariance(points));
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::InternalError, "covariance eigen decomposition did not converge");
  }
  // Eigen returns eigenvalues ascending.
  const Eigen::Vector3d& values = solver.eigenvalues();
  EigenTriple out;
  out.l1 = clamp_eigenvalue(values(2));
  out.l2 = std::min(clamp_eigenvalue(values(1)), out.l1);
  out.l3 = std::min(clamp_eigenvalue(values(0)), out.l2);

  Eigen::Vector3d v = solver.eigenvectors().col(0).normalized();
  bool flip = v.z() < 0.0;
  if (v.z() == 0.0) flip = v.x() < 0.0 || (v.x() == 0.0 && v.y() < 0.0);
  if (flip) v = -v;
  out.v3 = {v.x(), v.y(), v.z()};
  return out;
}

EigenPair2D eigen2d(std::span<const Point3> points) {
  if (points.empty()) throw Error(ErrorCode::EmptyCloud, "eigen decomposition of no points");
  const Eigen::Matrix3d cov = covariance(points);
  const double a = cov(0, 0);
  const double b = cov(0, 1);
  const double c = cov(1, 1);
  const double half_trace = 0.5 * (a + c);
  const double radius = std::hypot(0.5 * (a - c), b);
  EigenPair2D out;
  out.l1 = clamp_eigenvalue(half_trace + radius);
  // The small root loses precision by cancellation; recover it from the
  // determinant when the large root is well away from zero.
  double small = half_trace - radius;
  if (out.l1 > 0.0) small = (a * c - b * b) / out.l1;
  out.l2 = std::min(clamp_eigenvalue(small), out.l1);
  return out;
}

StructuralFeatureVector structural_stats(std::span<const Point3> points) {
  if (points.empty()) throw Error(ErrorCode::EmptyCloud, "statistics of an empty group");
  const EigenTriple e = covariance_eigen(points);
  const EigenPair2D e2 = eigen2d(points);
  const double k = static_cast<double>(points.size());
  const double sum = e.l1 + e.l2 + e.l3;
  const double product = e.l1 * e.l2 * e.l3;

  auto neg_x_log_x = [](double x) { return x > 0.0 ? -x * std::log(x) : 0.0; };

  StructuralFeatureVector s;
  if (sum > 0.0) {
    s.curvature = std::min(e.l3 / sum, 1.0 / 3.0);
    s.omnivariance = std::cbrt(product) / sum;
  }
  s.linearity = e.l1 > 0.0 ? (e.l1 - e.l2) / e.l1 : 0.0;
  s.eigenentropy = neg_x_log_x(e.l1) + neg_x_log_x(e.l2) + neg_x_log_x(e.l3);
  s.density = k / ((4.0 / 3.0) * std::max(product, kDensityProductFloor));
  s.scattering_2d = e2.l1 + e2.l2;
  s.linearity_2d = e2.l1 > 0.0 ? std::min(e2.l2 / e2.l1, 1.0) : 0.0;
  s.verticality = std::min(std::abs(e.v3[2]), 1.0);

  double z_min = points.front().z;
  double z_max = z_min;
  double z_mean = 0.0;
  for (const Point3& p : points) {
    z_min = std::min(z_min, p.z);
    z_max = std::max(z_max, p.z);
    z_mean += p.z - points.front().z;
  }
  z_mean /= k;
  double z_var = 0.0;
  for (const Point3& p : points) {
    const double d = (p.z - points.front().z) - z_mean;
    z_var += d * d;
  }
  s.height_range = z_max - z_min;
  s.height_variance = z_var / k;
  return s;
}

StructuralFeatureVector structural_stats(const NeighborhoodGroup& group) {
  return structural_stats(std::span<const Point3>(group.points));
}

FeatureMap assemble_feature_map(std::span<const GroupStats> stats, std::size_t h, std::size_t w,
                                std::span<const std::size_t> ks) {
  if (h == 0 || w == 0) throw Error(ErrorCode::InvalidGridSize, "feature map needs h, w >= 1");
  const auto sizes = sorted_group_sizes(ks);

  FeatureMap map{kNumStats * sizes.size(), h, w, {}};
  map.data.assign(map.channels * h * w, 0.0f);
  std::vector<bool> seen(h * w * sizes.size(), false);

  for (const GroupStats& g : stats) {
    const auto it = std::lower_bound(sizes.begin(), sizes.end(), g.k);
    if (g.cell.row >= h || g.cell.col >= w || it == sizes.end() || *it != g.k) {
      std::ostringstream msg;
      msg << "entry (" << g.cell.row << ", " << g.cell.col << ", k=" << g.k
          << ") outside the feature map layout";
      throw Error(ErrorCode::ShapeMismatch, msg.str());
    }
    const auto scale = static_cast<std::size_t>(it - sizes.begin());
    const std::size_t slot = (g.cell.row * w + g.cell.col) * sizes.size() + scale;
    if (seen[slot]) {
      throw Error(ErrorCode::ShapeMismatch, "duplicate statistics entry for one cell and scale");
    }
    seen[slot] = true;
    const auto values = g.stats.as_array();
    for (std::size_t f = 0; f < kNumStats; ++f) {
      map.at(kNumStats * scale + f, g.cell.row, g.cell.col) = static_cast<float>(values[f]);
    }
  }

  for (std::size_t slot = 0; slot < seen.size(); ++slot) {
    if (!seen[slot]) {
      const std::size_t cell = slot / sizes.size();
      std::ostringstream msg;
      msg << "missing statistics for cell (" << cell / w << ", " << cell % w
          << "), k=" << sizes[slot % sizes.size()];
      throw Error(ErrorCode::IncompleteStats, msg.str());
    }
  }
  return map;
}

std::vector<double> pooled_features(const FeatureMap& map) {
  std::vector<double> pooled(map.channels, 0.0);
  const std::size_t cells = map.h * map.w;
  for (std::size_t c = 0; c < map.channels; ++c) {
    double sum = 0.0;
    for (std::size_t i = 0; i < cells; ++i) sum += map.data[c * cells + i];
    pooled[c] = sum / static_cast<double>(cells);
  }
  return pooled;
}

FeatureMap extract_feature_map(const PointCloud& normalized_segment, const BBox& frame,
                               std::size_t raster, std::span<const std::size_t> ks) {
  const RasterGrid grid = raster_centers(frame, raster, raster);
  const auto groups = multi_scale_group(normalized_segment, grid, ks);
  std::vector<GroupStats> stats;
  stats.reserve(groups.size());
  for (const auto& g : groups) stats.push_back({g.cell, g.k, structural_stats(g)});
  return assemble_feature_map(stats, raster, raster, ks);
}

}  // namespace rffs
