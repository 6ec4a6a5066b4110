#include "rffs/types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rffs/error.hpp"

namespace rffs {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyManifest: return "EmptyManifest";
    case ErrorCode::NoTileFound: return "NoTileFound";
    case ErrorCode::EmptyCloud: return "EmptyCloud";
    case ErrorCode::InvalidFraction: return "InvalidFraction";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::InvalidSide: return "InvalidSide";
    case ErrorCode::InvalidGridSize: return "InvalidGridSize";
    case ErrorCode::IntensityRange: return "IntensityRange";
    case ErrorCode::IncompleteStats: return "IncompleteStats";
    case ErrorCode::InvalidSpeed: return "InvalidSpeed";
    case ErrorCode::InvalidClass: return "InvalidClass";
    case ErrorCode::NonFiniteFeature: return "NonFiniteFeature";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::MissingFeature: return "MissingFeature";
    case ErrorCode::FileError: return "FileError";
    case ErrorCode::InternalError: return "InternalError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

BBox BBox::make(double min_x, double min_y, double max_x, double max_y) {
  const bool finite = std::isfinite(min_x) && std::isfinite(min_y) &&
                      std::isfinite(max_x) && std::isfinite(max_y);
  if (!finite || !(max_x > min_x) || !(max_y > min_y)) {
    std::ostringstream msg;
    msg << "degenerate bbox [" << min_x << ", " << max_x << "] x [" << min_y << ", "
        << max_y << "]";
    throw Error(ErrorCode::InvalidSide, msg.str());
  }
  return BBox(min_x, min_y, max_x, max_y);
}

double clamp_eigenvalue(double lambda) {
  if (lambda >= 0.0) return lambda;
  if (lambda >= -kEigenClampTolerance) return 0.0;
  std::ostringstream msg;
  msg << "eigenvalue " << lambda << " is negative beyond clamp tolerance";
  throw Error(ErrorCode::InternalError, msg.str());
}

double median_z(const PointCloud& cloud) {
  if (cloud.empty()) throw Error(ErrorCode::EmptyCloud, "median of empty cloud");
  std::vector<double> z;
  z.reserve(cloud.size());
  for (const auto& p : cloud.points) z.push_back(p.z);
  const std::size_t mid = z.size() / 2;
  std::nth_element(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(mid), z.end());
  const double upper = z[mid];
  if (z.size() % 2 == 1) return upper;
  const double lower =
      *std::max_element(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

std::optional<CloudViolation> validate_cloud(const PointCloud& cloud) {
  if (cloud.empty()) return CloudViolation{std::nullopt, "empty cloud"};

  const double max_intensity = cloud.normalized ? 1.0 : 255.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point3& p = cloud.points[i];
    if (!std::isfinite(p.x)) return CloudViolation{i, "non-finite x"};
    if (!std::isfinite(p.y)) return CloudViolation{i, "non-finite y"};
    if (!std::isfinite(p.z)) return CloudViolation{i, "non-finite z"};
    if (!std::isfinite(p.intensity) || p.intensity < 0.0 || p.intensity > max_intensity) {
      return CloudViolation{i, cloud.normalized ? "intensity out of [0,1]"
                                                : "intensity out of [0,255]"};
    }
  }

  if (cloud.normalized && std::abs(median_z(cloud)) > 1e-9) {
    return CloudViolation{std::nullopt, "median z of normalized cloud is not 0"};
  }
  return std::nullopt;
}

}  // namespace rffs
