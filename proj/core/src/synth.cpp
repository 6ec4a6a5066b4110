#include "rffs/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "rffs/random.hpp"
#include "rffs/speed_head.hpp"

namespace rffs {

std::string_view to_string(SceneKind kind) {
  switch (kind) {
    case SceneKind::Highway: return "highway";
    case SceneKind::Rural: return "rural";
    case SceneKind::Urban: return "urban";
  }
  return "?";
}

std::optional<SceneKind> parse_scene_kind(std::string_view name) {
  if (name == "highway") return SceneKind::Highway;
  if (name == "rural") return SceneKind::Rural;
  if (name == "urban") return SceneKind::Urban;
  return std::nullopt;
}

double scene_speed_mph(SceneKind kind) {
  switch (kind) {
    case SceneKind::Highway: return 65.0;
    case SceneKind::Rural: return 35.0;
    case SceneKind::Urban: return 25.0;
  }
  return 0.0;
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double intensity(SplitMix64& rng, double lo, double hi) {
  return std::clamp(std::round(rng.uniform(lo, hi)), 0.0, 255.0);
}

// Box building in road-aligned coordinates (along, lateral).
struct Building {
  double along_min, along_max;
  double lat_min, lat_max;
  double height;
};

std::vector<Building> place_buildings(SplitMix64& rng, double road_half_width) {
  std::vector<Building> out;
  // Along-road extent covers the footprint diagonal so rotated scenes are
  // filled to the corners.
  const double reach = kSceneSide * std::numbers::sqrt2 / 2.0;
  for (double side : {-1.0, 1.0}) {
    double along = -reach;
    while (along < reach) {
      const double length = rng.uniform(15.0, 35.0);
      const double setback = rng.uniform(2.0, 6.0);
      const double depth = rng.uniform(15.0, 40.0);
      const double height = rng.uniform(10.0, 80.0);
      const double near = road_half_width + setback;
      const double far = near + depth;
      out.push_back({along, along + length, side > 0 ? near : -far, side > 0 ? far : -near, height});
      along += length + rng.uniform(3.0, 10.0);
    }
  }
  return out;
}

}  // namespace

Scene synth_scene(SceneKind kind, std::uint64_t seed, XY center, std::string id) {
  SplitMix64 rng(seed ^ (0xA5A5A5A5ULL * (static_cast<std::uint64_t>(kind) + 1)));

  const double heading = rng.uniform(0.0, 360.0);
  const double theta = heading * std::numbers::pi / 180.0;
  const XY along_dir{std::sin(theta), std::cos(theta)};
  const XY lateral_dir{std::cos(theta), -std::sin(theta)};
  const double base = rng.uniform(150.0, 350.0);

  // Rural terrain parameters.
  const double wave_a = rng.uniform(50.0, 80.0);
  const double wave_b = rng.uniform(50.0, 80.0);
  const double phase_a = rng.uniform(0.0, kTwoPi);
  const double phase_b = rng.uniform(0.0, kTwoPi);

  std::vector<Building> buildings;
  if (kind == SceneKind::Urban) buildings = place_buildings(rng, 5.0);

  Scene scene{{}, {}, BBox::make(center.x - kSceneSide / 2, center.y - kSceneSide / 2,
                                 center.x + kSceneSide / 2, center.y + kSceneSide / 2)};
  scene.cloud.points.reserve(kScenePoints);
  const double half = kSceneSide / 2.0;

  for (std::size_t n = 0; n < kScenePoints; ++n) {
    const double u = rng.uniform(-half, half);
    const double v = rng.uniform(-half, half);
    const double along = u * along_dir.x + v * along_dir.y;
    const double lateral = u * lateral_dir.x + v * lateral_dir.y;

    Point3 p{center.x + u, center.y + v, base, 0.0};
    switch (kind) {
      case SceneKind::Highway:
        if (std::abs(lateral) <= 12.0) {
          p.z += rng.normal(0.0, 0.05);
          p.intensity = intensity(rng, 25.0, 50.0);
        } else {
          p.z += rng.normal(0.0, 0.15);
          p.intensity = intensity(rng, 90.0, 140.0);
        }
        break;
      case SceneKind::Rural: {
        const double terrain =
            1.5 * std::sin(kTwoPi * u / wave_a + phase_a) + 1.5 * std::sin(kTwoPi * v / wave_b + phase_b);
        if (std::abs(lateral) <= 2.5) {
          p.z += terrain + rng.normal(0.0, 0.1);
          p.intensity = intensity(rng, 70.0, 110.0);
        } else {
          p.z += terrain + rng.normal(0.0, 0.3);
          p.intensity = intensity(rng, 100.0, 200.0);
        }
        break;
      }
      case SceneKind::Urban: {
        p.z += rng.normal(0.0, 0.05);
        p.intensity = intensity(rng, 30.0, 60.0);
        for (const Building& b : buildings) {
          if (along >= b.along_min && along <= b.along_max && lateral >= b.lat_min &&
              lateral <= b.lat_max) {
            p.z += b.height;
            p.intensity = intensity(rng, 120.0, 220.0);
            break;
          }
        }
        break;
      }
    }
    scene.cloud.points.push_back(p);
  }

  scene.label.id = id.empty() ? std::string(to_string(kind)) + "_" + std::to_string(seed) : std::move(id);
  scene.label.center = center;
  scene.label.heading_deg = heading;
  scene.label.speed_mph = scene_speed_mph(kind);
  scene.label.class_bin = bin_speed(scene.label.speed_mph);
  return scene;
}

}  // namespace rffs
