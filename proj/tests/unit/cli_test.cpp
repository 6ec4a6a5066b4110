#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "corpus.hpp"
#include "rffs/formats.hpp"

namespace rffs {
namespace {

namespace fs = std::filesystem;
using testing::fresh_dir;
using testing::read_file;
using testing::run_cli;

TEST(Cli, RequiresSubcommand) {
  EXPECT_EQ(run_cli({}).code, cli::kError);
  EXPECT_EQ(run_cli({"frobnicate"}).code, cli::kError);
  EXPECT_EQ(run_cli({"--help"}).code, cli::kOk);
}

TEST(Cli, MissingRequiredOption) {
  const auto r = run_cli({"train", "--features", "x"});
  EXPECT_EQ(r.code, cli::kError);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, SynthLayout) {
  const fs::path dir = fresh_dir("cli_synth");
  const auto r = run_cli({"synth", "--out", dir.string(), "--seed", "1", "--kind", "rural", "--count", "2"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto recs = read_manifest(dir / "manifest.json");
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].tile_id, "rural_000");
  EXPECT_EQ(recs[1].footprint.min_x() - recs[0].footprint.min_x(), 300.0);
  const auto labels = read_labels(dir / "labels.jsonl");
  ASSERT_EQ(labels.size(), 2u);
  EXPECT_EQ(labels[1].id, "rural_001");
  EXPECT_EQ(labels[1].speed_mph, 35.0);
  EXPECT_TRUE(recs[1].footprint.contains(labels[1].center));
  EXPECT_EQ(run_cli({"synth", "--out", dir.string(), "--kind", "arterial"}).code, cli::kError);
}

TEST(Cli, SynthIsSeedDeterministic) {
  const fs::path a = fresh_dir("cli_synth_a"), b = fresh_dir("cli_synth_b");
  run_cli({"synth", "--out", a.string(), "--seed", "4", "--highway", "1"});
  run_cli({"synth", "--out", b.string(), "--seed", "4", "--highway", "1"});
  EXPECT_EQ(read_file(a / "tiles/highway_000.pct"), read_file(b / "tiles/highway_000.pct"));
  EXPECT_EQ(read_file(a / "labels.jsonl"), read_file(b / "labels.jsonl"));
}

TEST(Cli, ExtractRejectsBadGroupSizes) {
  const fs::path dir = fresh_dir("cli_ks");
  run_cli({"synth", "--out", dir.string(), "--highway", "1"});
  const auto r = run_cli({"extract", "--manifest", (dir / "manifest.json").string(), "--labels",
                          (dir / "labels.jsonl").string(), "--out", (dir / "f").string(), "--ks", "16,x"});
  EXPECT_EQ(r.code, cli::kError);
}

TEST(Cli, EvalWithMissingTensorFails) {
  const fs::path dir = fresh_dir("cli_missing");
  run_cli({"synth", "--out", dir.string(), "--urban", "1"});
  LogisticModel m;
  m.mean.assign(30, 0.0);
  m.std.assign(30, 1.0);
  m.weights = Matrix(79, 31);
  write_model(dir / "model.json", m);
  const auto r = run_cli({"eval", "--model", (dir / "model.json").string(), "--features",
                          (dir / "nowhere").string(), "--labels", (dir / "labels.jsonl").string()});
  EXPECT_EQ(r.code, cli::kError);
  EXPECT_NE(r.err.find("no feature tensor"), std::string::npos);
}

TEST(Cli, ValidateSniffsFormats) {
  const fs::path dir = fresh_dir("cli_validate");
  run_cli({"synth", "--out", dir.string(), "--highway", "1"});
  write_tensor(dir / "t.fts", Tensor{{1, 2, 2}, {1, 2, 3, 4}});
  LogisticModel m;
  m.f = 2;
  m.mean = {0, 0};
  m.std = {1, 1};
  m.weights = Matrix(79, 3);
  write_model(dir / "model.json", m);
  const auto ok = run_cli({"validate", (dir / "tiles/highway_000.pct").string(), (dir / "t.fts").string(),
                           (dir / "labels.jsonl").string(), (dir / "manifest.json").string(),
                           (dir / "model.json").string()});
  EXPECT_EQ(ok.code, cli::kOk) << ok.out;
  EXPECT_NE(ok.out.find("tile, 60000 points"), std::string::npos);
  EXPECT_NE(ok.out.find("tensor 1 2 2"), std::string::npos);
  EXPECT_NE(ok.out.find("model, k=79, f=3"), std::string::npos);

  auto bytes = read_bytes(dir / "tiles/highway_000.pct");
  bytes.resize(bytes.size() - 5);
  write_bytes(dir / "cut.pct", bytes);
  write_text(dir / "junk.json", "{");
  const auto bad = run_cli({"validate", (dir / "cut.pct").string(), (dir / "junk.json").string(),
                            (dir / "t.fts").string()});
  EXPECT_EQ(bad.code, cli::kPartialFailure);
  EXPECT_NE(bad.out.find("cut.pct: invalid"), std::string::npos);
  EXPECT_NE(bad.out.find("junk.json: invalid"), std::string::npos);
}

}  // namespace
}  // namespace rffs
