#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "rffs/error.hpp"
#include "rffs/formats.hpp"
#include "rffs/pipeline.hpp"
#include "rffs/random.hpp"
#include "rffs/synth.hpp"

namespace rffs::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kSceneSpacing = 300.0;
constexpr std::size_t kScenesPerRow = 10;

struct SynthArgs {
  std::string out;
  std::uint64_t seed = 0;
  std::size_t highway = 0;
  std::size_t rural = 0;
  std::size_t urban = 0;
  std::string kind;
  std::size_t count = 1;
  double origin_x = 0.0;
  double origin_y = 0.0;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  std::vector<std::pair<SceneKind, std::size_t>> plan;
  if (!a.kind.empty()) {
    const auto kind = parse_scene_kind(a.kind);
    if (!kind) throw Error(ErrorCode::FormatError, "unknown scene kind '" + a.kind + "'");
    plan.emplace_back(*kind, a.count);
  } else {
    plan = {{SceneKind::Highway, a.highway}, {SceneKind::Rural, a.rural}, {SceneKind::Urban, a.urban}};
  }

  const fs::path root(a.out);
  fs::create_directories(root / "tiles");
  std::vector<TileRecord> records;
  std::vector<SpeedSample> labels;
  std::size_t slot = 0;
  for (const auto& [kind, count] : plan) {
    for (std::size_t i = 0; i < count; ++i, ++slot) {
      std::ostringstream id;
      id << to_string(kind) << '_' << std::setw(3) << std::setfill('0') << i;
      const XY center{a.origin_x + kSceneSpacing * static_cast<double>(slot % kScenesPerRow),
                      a.origin_y + kSceneSpacing * static_cast<double>(slot / kScenesPerRow)};
      const std::uint64_t scene_seed = SplitMix64(a.seed ^ fnv1a64(id.str())).next();
      Scene scene = synth_scene(kind, scene_seed, center, id.str());

      const std::string rel = "tiles/" + id.str() + ".pct";
      write_tile(root / rel, scene.cloud);
      records.push_back({id.str(), scene.footprint, rel});
      labels.push_back(scene.label);
    }
  }
  write_manifest(root / "manifest.json", records);
  write_labels(root / "labels.jsonl", labels);
  out << "wrote " << records.size() << " scenes to " << root.string() << "\n";
  return kOk;
}

int cmd_extract(const std::string& manifest, const std::string& labels, const std::string& out_dir,
                const ExtractOptions& options, std::ostream& out, std::ostream& err) {
  const ExtractSummary summary = extract_features(manifest, labels, out_dir, options);
  for (const LabelOutcome& o : summary.outcomes) {
    if (!o.ok) err << "label " << o.id << ": " << o.error << "\n";
  }
  out << "extracted " << summary.outcomes.size() - summary.failures() << "/"
      << summary.outcomes.size() << " labels\n";
  return summary.failures() == 0 ? kOk : kPartialFailure;
}

int cmd_train(const std::string& features, const std::string& labels, const std::string& model_out,
              const TrainConfig& config, std::ostream& out) {
  const Dataset data = load_dataset(features, labels);
  const TrainResult result = train_logistic(data.features, data.classes, config);
  write_model(model_out, result.model);
  std::ostringstream loss;
  loss << std::setprecision(17) << result.final_loss;
  out << "final_loss " << loss.str() << "\n";
  return kOk;
}

int cmd_eval(const std::string& model, const std::string& features, const std::string& labels,
             std::ostream& out) {
  const EvalRun run = evaluate_dataset(read_model(model), load_dataset(features, labels));
  out << report_to_json(run.report);
  return kOk;
}

int cmd_map(const std::string& model, const std::string& features, const std::string& labels,
            const std::string& geojson, std::ostream& out) {
  const EvalRun run = evaluate_dataset(read_model(model), load_dataset(features, labels));
  write_text(geojson, speed_map_geojson(run.samples));
  out << "wrote " << run.samples.size() << " features to " << geojson << "\n";
  return kOk;
}

// Validates one file by sniffing its format: tile and tensor files by
// magic, JSON lines by extension, otherwise manifest then model JSON.
bool validate_file(const fs::path& path, std::ostream& out) {
  const std::string name = path.string();
  try {
    const auto bytes = read_bytes(path);
    auto starts_with = [&](const char* magic) {
      return bytes.size() >= 4 && std::memcmp(bytes.data(), magic, 4) == 0;
    };
    if (starts_with("PCT1")) {
      const PointCloud cloud = decode_tile(bytes);
      if (const auto v = validate_cloud(cloud)) {
        out << name << ": invalid tile: " << v->what;
        if (v->index) out << " at point " << *v->index;
        out << "\n";
        return false;
      }
      out << name << ": ok (tile, " << cloud.size() << " points)\n";
      return true;
    }
    if (starts_with("FTS1")) {
      const Tensor t = decode_tensor(bytes);
      out << name << ": ok (tensor";
      for (auto d : t.dims) out << " " << d;
      out << ")\n";
      return true;
    }
    const std::string text(bytes.begin(), bytes.end());
    if (path.extension() == ".jsonl") {
      out << name << ": ok (" << parse_labels(text).size() << " labels)\n";
      return true;
    }
    try {
      const auto records = parse_manifest(text, path.parent_path());
      out << name << ": ok (manifest, " << records.size() << " tiles)\n";
      return true;
    } catch (const Error&) {
      const LogisticModel m = model_from_json(text);
      out << name << ": ok (model, k=" << m.k << ", f=" << m.f + 1 << ")\n";
      return true;
    }
  } catch (const Error& e) {
    out << name << ": invalid: " << e.what() << "\n";
    return false;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Point-cloud structural features and free-flow speed baseline"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic road scenes");
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();
  synth_cmd->add_option("--seed", synth.seed, "Corpus seed");
  synth_cmd->add_option("--highway", synth.highway, "Number of highway scenes");
  synth_cmd->add_option("--rural", synth.rural, "Number of rural scenes");
  synth_cmd->add_option("--urban", synth.urban, "Number of urban scenes");
  synth_cmd->add_option("--kind", synth.kind, "Single scene kind (highway|rural|urban)");
  synth_cmd->add_option("--count", synth.count, "Scenes of --kind to generate");
  synth_cmd->add_option("--origin-x", synth.origin_x, "Easting of the first scene center");
  synth_cmd->add_option("--origin-y", synth.origin_y, "Northing of the first scene center");

  std::string manifest, labels, out_dir, features, model, geojson;
  ExtractOptions extract;
  std::string ks = "16,32,128";
  auto* extract_cmd = app.add_subcommand("extract", "Extract 30x7x7 feature tensors per label");
  extract_cmd->add_option("--manifest", manifest, "Tile manifest JSON")->required();
  extract_cmd->add_option("--labels", labels, "Label JSON lines")->required();
  extract_cmd->add_option("--out", out_dir, "Output directory")->required();
  extract_cmd->add_option("--grid", extract.grid, "Sampling grid size per side")->capture_default_str();
  extract_cmd->add_option("--raster", extract.raster, "Raster center grid size")->capture_default_str();
  extract_cmd->add_option("--ks", ks, "Comma-separated group sizes")->capture_default_str();
  extract_cmd->add_option("--seed", extract.seed, "Run seed")->capture_default_str();
  extract_cmd->add_option("--threads", extract.threads, "Worker threads (0 = auto)");

  TrainConfig train;
  auto* train_cmd = app.add_subcommand("train", "Train the logistic speed head");
  train_cmd->add_option("--features", features, "Directory of feature tensors")->required();
  train_cmd->add_option("--labels", labels, "Label JSON lines")->required();
  train_cmd->add_option("--model", model, "Model JSON output")->required();
  train_cmd->add_option("--lr", train.learning_rate, "Learning rate")->capture_default_str();
  train_cmd->add_option("--epochs", train.epochs, "Epochs")->capture_default_str();
  train_cmd->add_option("--seed", train.seed, "Seed")->capture_default_str();

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate within-5mph accuracy; JSON report on stdout");
  eval_cmd->add_option("--model", model, "Model JSON")->required();
  eval_cmd->add_option("--features", features, "Directory of feature tensors")->required();
  eval_cmd->add_option("--labels", labels, "Label JSON lines")->required();

  auto* map_cmd = app.add_subcommand("map", "Write a GeoJSON map of true and predicted speeds");
  map_cmd->add_option("--model", model, "Model JSON")->required();
  map_cmd->add_option("--features", features, "Directory of feature tensors")->required();
  map_cmd->add_option("--labels", labels, "Label JSON lines")->required();
  map_cmd->add_option("--out", geojson, "GeoJSON output")->required();

  std::vector<std::string> files;
  auto* validate_cmd = app.add_subcommand("validate", "Validate tile, tensor, label, manifest or model files");
  validate_cmd->add_option("files", files, "Files to check")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kError;
  }

  try {
    if (*synth_cmd) return cmd_synth(synth, out);
    if (*extract_cmd) {
      extract.ks.clear();
      std::istringstream in(ks);
      for (std::string tok; std::getline(in, tok, ',');) {
        std::size_t pos = 0;
        const unsigned long v = std::stoul(tok, &pos);
        if (pos != tok.size()) throw Error(ErrorCode::InvalidK, "bad group size '" + tok + "'");
        extract.ks.push_back(v);
      }
      return cmd_extract(manifest, labels, out_dir, extract, out, err);
    }
    if (*train_cmd) return cmd_train(features, labels, model, train, out);
    if (*eval_cmd) return cmd_eval(model, features, labels, out);
    if (*map_cmd) return cmd_map(model, features, labels, geojson, out);
    if (*validate_cmd) {
      bool all_ok = true;
      for (const auto& f : files) all_ok = validate_file(f, out) && all_ok;
      return all_ok ? kOk : kPartialFailure;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}

}  // namespace rffs::cli
