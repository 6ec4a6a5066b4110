#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "rffs/types.hpp"

namespace rffs {

// Synthetic road scenes for desk-scale testing. The parameters are test
// fixtures chosen so the three kinds separate on structural statistics:
//
//   highway  24 m flat strip, z-noise 0.05 m, gently rough shoulders, 65 mph
//   rural     5 m strip on rolling terrain (two sinusoids, +-3 m total)
//            with 0.3 m noise, 35 mph
//   urban    10 m strip flanked by box buildings 10-80 m tall, 25 mph
enum class SceneKind { Highway, Rural, Urban };

std::string_view to_string(SceneKind kind);
std::optional<SceneKind> parse_scene_kind(std::string_view name);

inline constexpr std::size_t kScenePoints = 60000;
inline constexpr double kSceneSide = 200.0;

struct Scene {
  PointCloud cloud;  // raw: intensities in [0, 255], world coordinates
  SpeedSample label;
  BBox footprint;
};

/// Deterministic under (kind, seed, center). The road passes through center
/// at a seed-derived heading; every point lies inside the 200 x 200 m
/// footprint centered there.
Scene synth_scene(SceneKind kind, std::uint64_t seed, XY center = {0.0, 0.0},
                  std::string id = {});

double scene_speed_mph(SceneKind kind);

}  // namespace rffs
