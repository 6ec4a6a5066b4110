#include "rffs/formats.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "rffs/error.hpp"

namespace rffs {

namespace {

using json = nlohmann::ordered_json;

constexpr char kTileMagic[4] = {'P', 'C', 'T', '1'};
constexpr char kTensorMagic[4] = {'F', 'T', 'S', '1'};
constexpr std::uint16_t kFormatVersion = 1;

class Writer {
 public:
  void bytes(const char* p, std::size_t n) { out_.insert(out_.end(), p, p + n); }
  template <typename U>
  void uint(U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) { uint(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { uint(std::bit_cast<std::uint64_t>(v)); }
  std::vector<std::uint8_t> take() { return std::move(out_); }
  void reserve(std::size_t n) { out_.reserve(n); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::size_t remaining() const { return in_.size() - pos_; }
  bool has(std::size_t n) const { return remaining() >= n; }

  bool magic(const char (&m)[4]) {
    if (!has(4) || std::memcmp(in_.data() + pos_, m, 4) != 0) return false;
    pos_ += 4;
    return true;
  }
  template <typename U>
  U uint() {
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(static_cast<U>(in_[pos_ + i]) << (8 * i));
    pos_ += sizeof(U);
    return v;
  }
  float f32() { return std::bit_cast<float>(uint<std::uint32_t>()); }
  double f64() { return std::bit_cast<double>(uint<std::uint64_t>()); }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_tile(const PointCloud& cloud) {
  Writer w;
  w.reserve(kTileHeaderBytes + kTileRecordBytes * cloud.size());
  w.bytes(kTileMagic, 4);
  w.uint<std::uint16_t>(kFormatVersion);
  w.uint<std::uint16_t>(0);
  w.uint<std::uint64_t>(cloud.size());
  for (const Point3& p : cloud.points) {
    w.f64(p.x);
    w.f64(p.y);
    w.f64(p.z);
    w.f32(static_cast<float>(p.intensity));
    w.uint<std::uint32_t>(0);
  }
  return w.take();
}

PointCloud decode_tile(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  if (!r.has(kTileHeaderBytes)) throw Error(ErrorCode::TruncatedFile, "tile header is incomplete");
  if (!r.magic(kTileMagic)) throw Error(ErrorCode::FormatError, "tile magic is not PCT1");
  const auto version = r.uint<std::uint16_t>();
  const auto reserved = r.uint<std::uint16_t>();
  if (version != kFormatVersion) {
    throw Error(ErrorCode::FormatError, "unsupported tile version " + std::to_string(version));
  }
  if (reserved != 0) throw Error(ErrorCode::FormatError, "tile reserved field is nonzero");
  const auto count = r.uint<std::uint64_t>();
  const std::size_t available = r.remaining() / kTileRecordBytes;
  if (count > available) {
    std::ostringstream msg;
    msg << "tile declares " << count << " points but holds " << available;
    throw Error(ErrorCode::TruncatedFile, msg.str());
  }
  if (r.remaining() != count * kTileRecordBytes) {
    throw Error(ErrorCode::FormatError, "trailing bytes after tile payload");
  }

  PointCloud cloud;
  cloud.points.reserve(static_cast<std::size_t>(count));
  for (std::uint64_t i = 0; i < count; ++i) {
    Point3 p;
    p.x = r.f64();
    p.y = r.f64();
    p.z = r.f64();
    p.intensity = static_cast<double>(r.f32());
    if (r.uint<std::uint32_t>() != 0) {
      throw Error(ErrorCode::FormatError, "nonzero pad in tile record " + std::to_string(i));
    }
    cloud.points.push_back(p);
  }
  return cloud;
}

void write_tile(const std::filesystem::path& path, const PointCloud& cloud) {
  write_bytes(path, encode_tile(cloud));
}

PointCloud read_tile(const std::filesystem::path& path) { return decode_tile(read_bytes(path)); }

std::vector<std::uint8_t> encode_tensor(const Tensor& tensor) {
  if (tensor.dims.size() > std::numeric_limits<std::uint16_t>::max()) {
    throw Error(ErrorCode::ShapeMismatch, "too many tensor dimensions");
  }
  std::size_t expected = 1;
  for (auto d : tensor.dims) expected *= d;
  if (expected != tensor.data.size()) {
    throw Error(ErrorCode::ShapeMismatch, "tensor payload does not match its dims");
  }
  Writer w;
  w.reserve(8 + 4 * tensor.dims.size() + 4 * tensor.data.size());
  w.bytes(kTensorMagic, 4);
  w.uint<std::uint16_t>(kFormatVersion);
  w.uint<std::uint16_t>(static_cast<std::uint16_t>(tensor.dims.size()));
  for (auto d : tensor.dims) w.uint<std::uint32_t>(d);
  for (float v : tensor.data) w.f32(v);
  return w.take();
}

Tensor decode_tensor(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  if (!r.has(8)) throw Error(ErrorCode::TruncatedFile, "tensor header is incomplete");
  if (!r.magic(kTensorMagic)) throw Error(ErrorCode::FormatError, "tensor magic is not FTS1");
  const auto version = r.uint<std::uint16_t>();
  if (version != kFormatVersion) {
    throw Error(ErrorCode::FormatError, "unsupported tensor version " + std::to_string(version));
  }
  const auto ndim = r.uint<std::uint16_t>();
  if (!r.has(4u * ndim)) throw Error(ErrorCode::TruncatedFile, "tensor dims are incomplete");

  Tensor t;
  std::size_t count = 1;
  for (std::uint16_t i = 0; i < ndim; ++i) {
    t.dims.push_back(r.uint<std::uint32_t>());
    if (t.dims.back() != 0 && count > r.remaining() / t.dims.back()) {
      throw Error(ErrorCode::TruncatedFile, "tensor payload shorter than its dims");
    }
    count *= t.dims.back();
  }
  if (count > r.remaining() / 4) throw Error(ErrorCode::TruncatedFile, "tensor payload shorter than its dims");
  if (r.remaining() != 4 * count) throw Error(ErrorCode::FormatError, "trailing bytes after tensor payload");
  t.data.reserve(count);
  for (std::size_t i = 0; i < count; ++i) t.data.push_back(r.f32());
  return t;
}

void write_tensor(const std::filesystem::path& path, const Tensor& tensor) {
  write_bytes(path, encode_tensor(tensor));
}

Tensor read_tensor(const std::filesystem::path& path) { return decode_tensor(read_bytes(path)); }

Tensor to_tensor(const FeatureMap& map) {
  return Tensor{{static_cast<std::uint32_t>(map.channels), static_cast<std::uint32_t>(map.h),
                 static_cast<std::uint32_t>(map.w)},
                map.data};
}

FeatureMap to_feature_map(const Tensor& tensor) {
  if (tensor.dims.size() != 3) throw Error(ErrorCode::ShapeMismatch, "feature map tensors are 3-D");
  return FeatureMap{tensor.dims[0], tensor.dims[1], tensor.dims[2], tensor.data};
}

// ---------------------------------------------------------------------------

namespace {

double number_field(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) {
    throw Error(ErrorCode::FormatError, std::string("missing or non-numeric field \"") + key + "\"");
  }
  const double v = it->get<double>();
  if (!std::isfinite(v)) throw Error(ErrorCode::FormatError, std::string("non-finite \"") + key + "\"");
  return v;
}

std::string string_field(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw Error(ErrorCode::FormatError, std::string("missing or non-string field \"") + key + "\"");
  }
  return it->get<std::string>();
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::FormatError, what + ": " + e.what());
  }
}

}  // namespace

std::vector<SpeedSample> parse_labels(const std::string& text) {
  std::vector<SpeedSample> labels;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "labels line " + std::to_string(line_no);
    try {
      const json obj = parse_json(line, where);
      if (!obj.is_object()) throw Error(ErrorCode::FormatError, "label is not an object");
      SpeedSample s;
      s.id = string_field(obj, "id");
      s.center = {number_field(obj, "x"), number_field(obj, "y")};
      s.heading_deg = std::fmod(number_field(obj, "heading_deg"), 360.0);
      if (s.heading_deg < 0.0) s.heading_deg += 360.0;
      s.speed_mph = number_field(obj, "speed_mph");
      s.class_bin = bin_speed(s.speed_mph);
      labels.push_back(std::move(s));
    } catch (const Error& e) {
      throw Error(e.code() == ErrorCode::InvalidSpeed ? ErrorCode::InvalidSpeed : ErrorCode::FormatError,
                  where + ": " + e.what());
    }
  }
  return labels;
}

std::vector<SpeedSample> read_labels(const std::filesystem::path& path) {
  return parse_labels(read_text(path));
}

void write_labels(const std::filesystem::path& path, std::span<const SpeedSample> labels) {
  std::string out;
  for (const SpeedSample& s : labels) {
    json obj;
    obj["id"] = s.id;
    obj["x"] = s.center.x;
    obj["y"] = s.center.y;
    obj["heading_deg"] = s.heading_deg;
    obj["speed_mph"] = s.speed_mph;
    out += obj.dump();
    out += '\n';
  }
  write_text(path, out);
}

std::vector<TileRecord> parse_manifest(const std::string& text, const std::filesystem::path& base_dir) {
  const json doc = parse_json(text, "tile manifest");
  if (!doc.is_array()) throw Error(ErrorCode::FormatError, "tile manifest must be a JSON array");
  std::vector<TileRecord> records;
  records.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& obj = doc[i];
    try {
      if (!obj.is_object()) throw Error(ErrorCode::FormatError, "entry is not an object");
      std::filesystem::path path = string_field(obj, "path");
      if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
      records.push_back(TileRecord{
          string_field(obj, "tile_id"),
          BBox::make(number_field(obj, "min_x"), number_field(obj, "min_y"),
                     number_field(obj, "max_x"), number_field(obj, "max_y")),
          path.string()});
    } catch (const Error& e) {
      throw Error(ErrorCode::FormatError, "manifest entry " + std::to_string(i) + ": " + e.what());
    }
  }
  return records;
}

std::vector<TileRecord> read_manifest(const std::filesystem::path& path) {
  return parse_manifest(read_text(path), path.parent_path());
}

void write_manifest(const std::filesystem::path& path, std::span<const TileRecord> records) {
  json doc = json::array();
  for (const TileRecord& r : records) {
    json obj;
    obj["tile_id"] = r.tile_id;
    obj["min_x"] = r.footprint.min_x();
    obj["min_y"] = r.footprint.min_y();
    obj["max_x"] = r.footprint.max_x();
    obj["max_y"] = r.footprint.max_y();
    obj["path"] = r.path;
    doc.push_back(std::move(obj));
  }
  write_text(path, doc.dump(2) + "\n");
}

std::string model_to_json(const LogisticModel& model) {
  json doc;
  doc["k"] = model.k;
  doc["f"] = model.f + 1;
  doc["mean"] = model.mean;
  doc["std"] = model.std;
  doc["weights"] = model.weights.data;
  return doc.dump() + "\n";
}

LogisticModel model_from_json(const std::string& text) {
  const json doc = parse_json(text, "model");
  try {
    LogisticModel m;
    m.k = doc.at("k").get<int>();
    const auto width = doc.at("f").get<std::size_t>();
    if (m.k <= 0 || width < 1) throw Error(ErrorCode::FormatError, "model k and f must be positive");
    m.f = width - 1;
    m.mean = doc.at("mean").get<std::vector<double>>();
    m.std = doc.at("std").get<std::vector<double>>();
    m.weights = Matrix(static_cast<std::size_t>(m.k), width);
    m.weights.data = doc.at("weights").get<std::vector<double>>();
    if (m.mean.size() != m.f || m.std.size() != m.f ||
        m.weights.data.size() != static_cast<std::size_t>(m.k) * width) {
      throw Error(ErrorCode::FormatError, "model arrays do not match k and f");
    }
    for (double s : m.std) {
      if (!(s > 0.0)) throw Error(ErrorCode::FormatError, "model std entries must be positive");
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::FormatError, std::string("model: ") + e.what());
  }
}

void write_model(const std::filesystem::path& path, const LogisticModel& model) {
  write_text(path, model_to_json(model));
}

LogisticModel read_model(const std::filesystem::path& path) { return model_from_json(read_text(path)); }

// ---------------------------------------------------------------------------

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileError, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::FileError, "error reading " + path.string());
  return bytes;
}

std::string read_text(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  return std::string(bytes.begin(), bytes.end());
}

void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::FileError, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::FileError, "error writing " + path.string());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  write_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace rffs
