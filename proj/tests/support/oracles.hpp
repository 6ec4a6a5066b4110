#pragma once

// Independent reference computations used only by tests. Nothing here calls
// into the code paths being checked.

#include <boost/multiprecision/cpp_dec_float.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "rffs/types.hpp"

namespace rffs::oracle {

/// All indices sorted by (squared xy distance, index), truncated to k.
inline std::vector<std::size_t> brute_knn(const std::vector<XY>& pts,
                                          const std::vector<std::size_t>& ids, XY q, std::size_t k) {
  std::vector<std::pair<double, std::size_t>> d;
  d.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double dx = q.x - pts[i].x;
    const double dy = q.y - pts[i].y;
    d.emplace_back(dx * dx + dy * dy, ids[i]);
  }
  std::sort(d.begin(), d.end());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < std::min(k, d.size()); ++i) out.push_back(d[i].second);
  return out;
}

inline std::vector<std::size_t> brute_knn(const PointCloud& cloud, XY q, std::size_t k) {
  std::vector<XY> pts;
  std::vector<std::size_t> ids;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    pts.push_back(cloud[i].xy());
    ids.push_back(i);
  }
  return brute_knn(pts, ids, q, k);
}

struct Rect {
  std::string id;
  double min_x, min_y, max_x, max_y;
};

/// Linear scan containment with smallest-id tie-break; empty string if none.
inline std::string brute_locate(const std::vector<Rect>& rects, XY p) {
  std::string best;
  bool found = false;
  for (const Rect& r : rects) {
    if (p.x >= r.min_x && p.x <= r.max_x && p.y >= r.min_y && p.y <= r.max_y) {
      if (!found || r.id < best) best = r.id;
      found = true;
    }
  }
  return best;
}

/// Population covariance of (x, y, z) by the textbook two-pass formula.
inline std::array<std::array<double, 3>, 3> covariance(const std::vector<Point3>& pts) {
  std::array<double, 3> mean{0, 0, 0};
  for (const auto& p : pts) {
    mean[0] += p.x;
    mean[1] += p.y;
    mean[2] += p.z;
  }
  for (double& m : mean) m /= static_cast<double>(pts.size());
  std::array<std::array<double, 3>, 3> c{};
  for (const auto& p : pts) {
    const std::array<double, 3> d{p.x - mean[0], p.y - mean[1], p.z - mean[2]};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) c[i][j] += d[i] * d[j];
  }
  for (auto& row : c)
    for (double& v : row) v /= static_cast<double>(pts.size());
  return c;
}

/// Eigenvalues of a symmetric 3x3 matrix as roots of its characteristic
/// polynomial (trigonometric Cardano form), descending. Computed in long
/// double.
inline std::array<double, 3> symmetric_eigenvalues(const std::array<std::array<double, 3>, 3>& m) {
  using R = long double;
  const R a = m[0][0], b = m[1][1], c = m[2][2];
  const R d = m[0][1], e = m[1][2], f = m[0][2];
  const R p1 = d * d + e * e + f * f;
  std::array<R, 3> ev;
  if (p1 == 0) {
    ev = {a, b, c};
  } else {
    const R q = (a + b + c) / 3;
    const R p2 = (a - q) * (a - q) + (b - q) * (b - q) + (c - q) * (c - q) + 2 * p1;
    const R p = std::sqrt(p2 / 6);
    // B = (A - qI) / p, r = det(B) / 2
    const R ba = (a - q) / p, bb = (b - q) / p, bc = (c - q) / p;
    const R bd = d / p, be = e / p, bf = f / p;
    const R det = ba * (bb * bc - be * be) - bd * (bd * bc - be * bf) + bf * (bd * be - bb * bf);
    R r = det / 2;
    r = std::clamp(r, R(-1), R(1));
    const R phi = std::acos(r) / 3;
    const R pi = std::numbers::pi_v<long double>;
    const R e1 = q + 2 * p * std::cos(phi);
    const R e3 = q + 2 * p * std::cos(phi + 2 * pi / 3);
    ev = {e1, 3 * q - e1 - e3, e3};
  }
  std::array<double, 3> out{static_cast<double>(ev[0]), static_cast<double>(ev[1]),
                            static_cast<double>(ev[2])};
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

/// Mean softmax cross-entropy evaluated with 50 significant digits.
inline double precise_cross_entropy(const std::vector<std::vector<double>>& logits,
                                    const std::vector<int>& labels) {
  using Big = boost::multiprecision::cpp_dec_float_50;
  Big total = 0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    Big denom = 0;
    for (double z : logits[i]) denom += boost::multiprecision::exp(Big(z));
    total -= boost::multiprecision::log(boost::multiprecision::exp(Big(logits[i][labels[i]])) / denom);
  }
  total /= static_cast<int>(logits.size());
  return total.convert_to<double>();
}

/// Random cloud with integer-valued raw intensities.
inline PointCloud random_cloud(std::mt19937_64& rng, std::size_t n, double lo = -100.0,
                               double hi = 100.0, double z_spread = 10.0) {
  std::uniform_real_distribution<double> xy(lo, hi);
  std::uniform_real_distribution<double> z(-z_spread, z_spread);
  std::uniform_int_distribution<int> intensity(0, 255);
  PointCloud c;
  for (std::size_t i = 0; i < n; ++i) c.points.push_back({xy(rng), xy(rng), z(rng), double(intensity(rng))});
  return c;
}

}  // namespace rffs::oracle
