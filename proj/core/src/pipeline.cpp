#include "rffs/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "rffs/error.hpp"
#include "rffs/formats.hpp"
#include "rffs/random.hpp"
#include "rffs/spatial_index.hpp"

namespace rffs {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::uint64_t label_seed(std::uint64_t run_seed, const std::string& label_id) {
  return run_seed ^ fnv1a64(label_id);
}

std::size_t resolve_threads(std::size_t requested) {
  std::size_t n = requested > 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* cap = std::getenv("RFFS_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(cap, &end, 10);
    if (end != cap && *end == '\0' && v > 0) n = std::min(n, static_cast<std::size_t>(v));
  }
  return n;
}

FeatureMap extract_segment(const PointCloud& tile, const SpeedSample& label,
                           const ExtractOptions& options) {
  const KdTree tree = build_kdtree(tile, options.fraction, label_seed(options.seed, label.id));
  const BBox segment = segment_bbox(label.center, options.side);
  const PointCloud sampled = sample_cloud(tree, tile, sampling_grid(segment, options.grid));
  const PointCloud normalized = normalize_cloud(sampled, label.center, label.heading_deg);
  return extract_feature_map(normalized, segment_bbox({0.0, 0.0}, options.side), options.raster,
                             options.ks);
}

std::size_t ExtractSummary::failures() const {
  return static_cast<std::size_t>(
      std::count_if(outcomes.begin(), outcomes.end(), [](const LabelOutcome& o) { return !o.ok; }));
}

namespace {

bool safe_file_stem(const std::string& id) {
  if (id.empty() || id == "." || id == "..") return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

json params_json(const ExtractOptions& o) {
  json p;
  p["grid"] = o.grid;
  p["raster"] = o.raster;
  p["ks"] = o.ks;
  p["seed"] = o.seed;
  p["fraction"] = o.fraction;
  p["side"] = o.side;
  return p;
}

}  // namespace

ExtractSummary extract_features(const fs::path& manifest, const fs::path& labels_path,
                                const fs::path& out_dir, const ExtractOptions& options) {
  const TileIndex index = build_tile_index(read_manifest(manifest));
  const std::vector<SpeedSample> labels = read_labels(labels_path);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::FileError, "cannot create " + out_dir.string() + ": " + ec.message());

  ExtractSummary summary;
  summary.outcomes.resize(labels.size());

  auto process = [&](std::size_t i) {
    const SpeedSample& label = labels[i];
    LabelOutcome& outcome = summary.outcomes[i];
    outcome.id = label.id;
    try {
      if (!safe_file_stem(label.id)) {
        throw Error(ErrorCode::FormatError, "label id is not usable as a file name");
      }
      const TileRecord& tile = locate_tile(index, label.center);
      outcome.tile_id = tile.tile_id;
      const FeatureMap map = extract_segment(read_tile(tile.path), label, options);
      write_tensor(out_dir / (label.id + kTensorExtension), to_tensor(map));

      json sidecar;
      sidecar["id"] = label.id;
      sidecar["class_bin"] = label.class_bin;
      sidecar["speed_mph"] = label.speed_mph;
      sidecar["tile_id"] = tile.tile_id;
      sidecar["label_seed"] = label_seed(options.seed, label.id);
      sidecar["shape"] = {map.channels, map.h, map.w};
      sidecar["params"] = params_json(options);
      write_text(out_dir / (label.id + ".json"), sidecar.dump(2) + "\n");
      outcome.ok = true;
    } catch (const std::exception& e) {
      outcome.ok = false;
      outcome.error = e.what();
      if (safe_file_stem(label.id)) {
        fs::remove(out_dir / (label.id + kTensorExtension), ec);
        fs::remove(out_dir / (label.id + ".json"), ec);
      }
    }
  };

  const std::size_t workers = std::min(resolve_threads(options.threads), std::max<std::size_t>(labels.size(), 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < labels.size(); ++i) process(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < labels.size(); i = next++) process(i);
      });
    }
  }

  json doc;
  doc["params"] = params_json(options);
  doc["labels"] = json::array();
  for (const LabelOutcome& o : summary.outcomes) {
    json entry;
    entry["id"] = o.id;
    entry["status"] = o.ok ? "ok" : "error";
    entry["tile_id"] = o.tile_id;
    if (!o.ok) entry["error"] = o.error;
    doc["labels"].push_back(std::move(entry));
  }
  doc["failures"] = summary.failures();
  write_text(out_dir / kSummaryFile, doc.dump(2) + "\n");
  return summary;
}

Dataset load_dataset(const fs::path& features_dir, const fs::path& labels_path) {
  Dataset data;
  data.labels = read_labels(labels_path);
  if (data.labels.empty()) throw Error(ErrorCode::EmptyDataset, "no labels in " + labels_path.string());
  for (const SpeedSample& label : data.labels) {
    const fs::path tensor = features_dir / (label.id + kTensorExtension);
    if (!fs::exists(tensor)) {
      throw Error(ErrorCode::MissingFeature, "no feature tensor for label " + label.id);
    }
    data.features.push_back(pooled_features(to_feature_map(read_tensor(tensor))));
    data.classes.push_back(label.class_bin);
  }
  return data;
}

EvalRun evaluate_dataset(const LogisticModel& model, const Dataset& data) {
  if (data.labels.empty()) throw Error(ErrorCode::EmptyDataset, "nothing to evaluate");
  EvalRun run;
  Matrix logits(data.labels.size(), static_cast<std::size_t>(model.k));
  std::vector<double> preds;
  std::vector<double> truths;
  for (std::size_t i = 0; i < data.labels.size(); ++i) {
    const auto z = model.logits(data.features[i]);
    std::copy(z.begin(), z.end(), logits.data.begin() + static_cast<std::ptrdiff_t>(i * logits.cols));
    const Prediction p = predict(model, data.features[i]);
    const SpeedSample& label = data.labels[i];
    run.samples.push_back({label.id, label.center, label.speed_mph, p.mph, p.class_index});
    preds.push_back(p.mph);
    truths.push_back(label.speed_mph);
  }
  run.report = evaluate(preds, truths);
  run.report.mean_cross_entropy = cross_entropy(logits, data.classes);
  return run;
}

std::string report_to_json(const EvalReport& report) {
  json doc;
  doc["n"] = report.n;
  doc["within5_accuracy"] = report.within5_accuracy;
  doc["mean_abs_error"] = report.mean_abs_error;
  if (report.mean_cross_entropy) doc["mean_cross_entropy"] = *report.mean_cross_entropy;
  doc["per_class"] = json::array();
  for (const ClassSummary& c : report.per_class) {
    json entry;
    entry["class"] = c.class_index;
    entry["mph"] = bin_center(c.class_index);
    entry["count"] = c.count;
    entry["within5"] = c.within5;
    entry["mean_abs_error"] = c.mean_abs_error;
    entry["most_predicted_class"] = c.most_predicted_class;
    doc["per_class"].push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

std::string speed_map_geojson(const std::vector<SamplePrediction>& samples) {
  json doc;
  doc["type"] = "FeatureCollection";
  doc["features"] = json::array();
  for (const SamplePrediction& s : samples) {
    json feature;
    feature["type"] = "Feature";
    feature["geometry"] = {{"type", "Point"}, {"coordinates", {s.location.x, s.location.y}}};
    feature["properties"] = {{"id", s.id},
                             {"true_mph", s.true_mph},
                             {"pred_mph", s.pred_mph},
                             {"abs_err", std::abs(s.pred_mph - s.true_mph)}};
    doc["features"].push_back(std::move(feature));
  }
  return doc.dump(2) + "\n";
}

}  // namespace rffs
