#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rffs/raster_features.hpp"
#include "rffs/segment_sampler.hpp"
#include "rffs/speed_head.hpp"
#include "rffs/types.hpp"

namespace rffs {

struct ExtractOptions {
  std::size_t grid = kSamplingGridSize;
  std::size_t raster = kRasterSize;
  std::vector<std::size_t> ks{kDefaultGroupSizes.begin(), kDefaultGroupSizes.end()};
  std::uint64_t seed = 0;
  double fraction = 0.5;
  double side = kSegmentSide;
  std::size_t threads = 0;  // 0: hardware concurrency; RFFS_THREADS caps either way
};

/// Per-label seed: the run seed XOR the FNV-1a hash of the label id.
std::uint64_t label_seed(std::uint64_t run_seed, const std::string& label_id);

/// Worker count after applying the RFFS_THREADS cap.
std::size_t resolve_threads(std::size_t requested);

/// The per-label chain over an already-loaded tile: subsample k-d tree,
/// grid sampling, normalization, raster grouping, statistics, assembly.
FeatureMap extract_segment(const PointCloud& tile, const SpeedSample& label,
                           const ExtractOptions& options);

struct LabelOutcome {
  std::string id;
  bool ok = false;
  std::string tile_id;
  std::string error;
};

struct ExtractSummary {
  std::vector<LabelOutcome> outcomes;  // in label-file order

  std::size_t failures() const;
};

/// Writes <out>/<id>.fts and <out>/<id>.json per label plus
/// <out>/extract_summary.json. Per-label failures are recorded, not thrown;
/// manifest/label/directory problems throw.
ExtractSummary extract_features(const std::filesystem::path& manifest,
                                const std::filesystem::path& labels,
                                const std::filesystem::path& out_dir, const ExtractOptions& options);

inline constexpr const char* kTensorExtension = ".fts";
inline constexpr const char* kSummaryFile = "extract_summary.json";

struct Dataset {
  std::vector<SpeedSample> labels;
  std::vector<std::vector<double>> features;  // pooled, one row per label
  std::vector<int> classes;
};

/// Pooled features for every label. Throws MissingFeature when a tensor is
/// absent and EmptyDataset when there are no labels.
Dataset load_dataset(const std::filesystem::path& features_dir, const std::filesystem::path& labels);

struct SamplePrediction {
  std::string id;
  XY location;
  double true_mph = 0.0;
  double pred_mph = 0.0;
  int pred_class = 0;
};

struct EvalRun {
  EvalReport report;
  std::vector<SamplePrediction> samples;
};

EvalRun evaluate_dataset(const LogisticModel& model, const Dataset& data);

std::string report_to_json(const EvalReport& report);

/// GeoJSON FeatureCollection, one Point per sample with properties
/// {id, true_mph, pred_mph, abs_err}.
std::string speed_map_geojson(const std::vector<SamplePrediction>& samples);

}  // namespace rffs
