#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace rffs {

/// Planar position in a projected CRS, meters.
struct XY {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const XY&, const XY&) = default;
};

/// A single LiDAR return. Intensity is raw [0, 255] until the owning cloud
/// is normalized, then [0, 1].
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double intensity = 0.0;

  XY xy() const { return {x, y}; }

  friend bool operator==(const Point3&, const Point3&) = default;
};

struct PointCloud {
  std::vector<Point3> points;
  bool normalized = false;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  const Point3& operator[](std::size_t i) const { return points[i]; }
};

/// Axis-aligned rectangle. Constructed through make() so an instance always
/// satisfies max > min on both axes.
class BBox {
 public:
  static BBox make(double min_x, double min_y, double max_x, double max_y);

  double min_x() const { return min_x_; }
  double min_y() const { return min_y_; }
  double max_x() const { return max_x_; }
  double max_y() const { return max_y_; }
  double width() const { return max_x_ - min_x_; }
  double height() const { return max_y_ - min_y_; }
  XY center() const { return {0.5 * (min_x_ + max_x_), 0.5 * (min_y_ + max_y_)}; }

  /// Closed containment: boundary points are inside.
  bool contains(XY p) const {
    return p.x >= min_x_ && p.x <= max_x_ && p.y >= min_y_ && p.y <= max_y_;
  }

  friend bool operator==(const BBox&, const BBox&) = default;

 private:
  BBox(double min_x, double min_y, double max_x, double max_y)
      : min_x_(min_x), min_y_(min_y), max_x_(max_x), max_y_(max_y) {}

  double min_x_, min_y_, max_x_, max_y_;
};

/// Georeferenced free-flow speed label.
struct SpeedSample {
  std::string id;
  XY center;
  double heading_deg = 0.0;  // clockwise from north, [0, 360)
  double speed_mph = 0.0;
  int class_bin = 0;         // bin_speed(speed_mph)
};

/// Covariance spectrum of a 3D neighborhood, descending, plus the unit
/// eigenvector of the smallest eigenvalue.
struct EigenTriple {
  double l1 = 0.0;
  double l2 = 0.0;
  double l3 = 0.0;
  std::array<double, 3> v3{0.0, 0.0, 1.0};
};

/// Spectrum of the xy-projected covariance, descending.
struct EigenPair2D {
  double l1 = 0.0;
  double l2 = 0.0;
};

/// Eigenvalues this far below zero are floating-point drift and are clamped.
inline constexpr double kEigenClampTolerance = 1e-9;

/// Clamps a drifted eigenvalue to zero; throws InternalError when the value
/// is more negative than kEigenClampTolerance.
double clamp_eigenvalue(double lambda);

struct CloudViolation {
  std::optional<std::size_t> index;  // offending point, if point-specific
  std::string what;

  friend bool operator==(const CloudViolation&, const CloudViolation&) = default;
};

/// Returns the first violated PointCloud invariant, or nullopt when the cloud
/// is valid.
std::optional<CloudViolation> validate_cloud(const PointCloud& cloud);

/// Median of z with even counts resolved as the mean of the two middle values.
double median_z(const PointCloud& cloud);

}  // namespace rffs
