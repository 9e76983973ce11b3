#include "scn/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "scn/error.hpp"

namespace scn {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<unsigned char> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const fs::path& path, const std::vector<unsigned char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed for " + path.string());
}

std::uint64_t get_le64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int b = 7; b >= 0; --b) v = (v << 8) | p[b];
  return v;
}

void put_le64(std::vector<unsigned char>& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<unsigned char>(v >> (8 * b)));
}

float get_lef32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int b = 3; b >= 0; --b) v = (v << 8) | p[b];
  return std::bit_cast<float>(v);
}

void put_lef32(std::vector<unsigned char>& out, float f) {
  const auto v = std::bit_cast<std::uint32_t>(f);
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<unsigned char>(v >> (8 * b)));
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": invalid JSON: " + e.what());
  }
}

fs::path resolve(const fs::path& base_file, const std::string& p) {
  fs::path candidate(p);
  return candidate.is_absolute() ? candidate : base_file.parent_path() / candidate;
}

std::vector<float> decode_pixels(const unsigned char* p, std::size_t count, PixelType type) {
  std::vector<float> values(count);
  if (type == PixelType::u8) {
    for (std::size_t k = 0; k < count; ++k) values[k] = static_cast<float>(p[k]) / 255.0f;
  } else {
    for (std::size_t k = 0; k < count; ++k) values[k] = get_lef32(p + 4 * k);
  }
  return values;
}

}  // namespace

DatasetManifest parse_manifest(const fs::path& path) {
  const json doc = read_json(path);
  DatasetManifest m;
  try {
    const auto& shape = doc.at("shape");
    if (!shape.is_array() || shape.size() != 3) throw DataError(path.string() + ": shape must be [H,W,C]");
    m.shape = {shape[0].get<std::size_t>(), shape[1].get<std::size_t>(), shape[2].get<std::size_t>()};
    if (m.shape.elements() == 0) throw DataError(path.string() + ": shape has a zero dimension");
    const auto dtype = doc.at("dtype").get<std::string>();
    if (dtype == "u8") {
      m.dtype = PixelType::u8;
    } else if (dtype == "f32") {
      m.dtype = PixelType::f32;
    } else {
      throw DataError(path.string() + ": unknown dtype '" + dtype + "'");
    }
    m.records = resolve(path, doc.at("records").get<std::string>());
    m.labels = resolve(path, doc.at("labels").get<std::string>());
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return m;
}

Sample load_manifest(const fs::path& path) {
  const DatasetManifest m = parse_manifest(path);
  const auto records = read_bytes(m.records);
  const auto labels = read_bytes(m.labels);
  const std::size_t elem_bytes = m.dtype == PixelType::u8 ? 1 : 4;
  const std::size_t record_bytes = m.shape.elements() * elem_bytes;
  if (records.size() % record_bytes != 0) {
    throw DataError(m.records.string() + ": size " + std::to_string(records.size()) +
                    " is not a multiple of the record size " + std::to_string(record_bytes));
  }
  const std::size_t count = records.size() / record_bytes;
  if (count == 0) throw DataError(m.records.string() + ": no records");
  if (labels.size() != 2 * count) {
    throw DataError(m.labels.string() + ": label count mismatch: expected " + std::to_string(count) +
                    " u16 labels, file holds " + std::to_string(labels.size()) + " bytes");
  }
  std::vector<DataPoint> points;
  std::vector<Label> labs;
  points.reserve(count);
  labs.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    try {
      points.emplace_back(m.shape, decode_pixels(records.data() + i * record_bytes, m.shape.elements(), m.dtype));
    } catch (const DataError& e) {
      throw DataError(m.records.string() + ": record " + std::to_string(i) + ": " + e.what());
    }
    labs.push_back(static_cast<Label>(labels[2 * i] | (labels[2 * i + 1] << 8)));
  }
  return Sample(std::move(points), std::move(labs));
}

void save_manifest(const Sample& sample, const fs::path& manifest_path) {
  bool bytes_exact = true;
  for (const auto& p : sample.points()) {
    for (float v : p.values()) {
      if (v < 0.0f || v > 1.0f || static_cast<float>(std::lround(v * 255.0f)) / 255.0f != v) {
        bytes_exact = false;
        break;
      }
    }
    if (!bytes_exact) break;
  }
  std::vector<unsigned char> records;
  for (const auto& p : sample.points()) {
    for (float v : p.values()) {
      if (bytes_exact) {
        records.push_back(static_cast<unsigned char>(std::lround(v * 255.0f)));
      } else {
        put_lef32(records, v);
      }
    }
  }
  std::vector<unsigned char> labels;
  for (Label l : sample.labels()) {
    labels.push_back(static_cast<unsigned char>(l & 0xff));
    labels.push_back(static_cast<unsigned char>(l >> 8));
  }
  const std::string stem = manifest_path.stem().string();
  const fs::path records_path = manifest_path.parent_path() / (stem + ".records");
  const fs::path labels_path = manifest_path.parent_path() / (stem + ".labels");
  write_bytes(records_path, records);
  write_bytes(labels_path, labels);
  const auto& s = sample.shape();
  json doc = {{"shape", {s.height, s.width, s.channels}},
              {"dtype", bytes_exact ? "u8" : "f32"},
              {"records", records_path.filename().string()},
              {"labels", labels_path.filename().string()}};
  std::ofstream out(manifest_path);
  if (!out) throw DataError("cannot write " + manifest_path.string());
  out << doc.dump(2) << "\n";
}

Sample load_cifar_batch(const fs::path& path, std::size_t first_id) {
  const auto bytes = read_bytes(path);
  if (bytes.empty() || bytes.size() % kCifarRecordBytes != 0) {
    throw DataError(path.string() + ": size " + std::to_string(bytes.size()) +
                    " is not a positive multiple of " + std::to_string(kCifarRecordBytes));
  }
  const std::size_t count = bytes.size() / kCifarRecordBytes;
  constexpr std::size_t plane = kCifarSide * kCifarSide;
  const TensorShape shape{kCifarSide, kCifarSide, 3};
  std::vector<DataPoint> points;
  std::vector<Label> labels;
  std::vector<std::size_t> ids;
  points.reserve(count);
  for (std::size_t r = 0; r < count; ++r) {
    const unsigned char* rec = bytes.data() + r * kCifarRecordBytes;
    std::vector<float> values(3 * plane);
    for (std::size_t px = 0; px < plane; ++px) {
      for (std::size_t c = 0; c < 3; ++c) {
        values[px * 3 + c] = static_cast<float>(rec[1 + c * plane + px]) / 255.0f;
      }
    }
    points.emplace_back(shape, std::move(values));
    labels.push_back(rec[0]);
    ids.push_back(first_id + r);
  }
  return Sample(std::move(points), std::move(labels), std::move(ids));
}

Sample load_cifar_batches(const std::vector<fs::path>& paths) {
  if (paths.empty()) throw UsageError("no CIFAR batch files given");
  std::vector<DataPoint> points;
  std::vector<Label> labels;
  std::vector<std::size_t> ids;
  for (const auto& p : paths) {
    Sample batch = load_cifar_batch(p, points.size());
    points.insert(points.end(), batch.points().begin(), batch.points().end());
    labels.insert(labels.end(), batch.labels().begin(), batch.labels().end());
    ids.insert(ids.end(), batch.ids().begin(), batch.ids().end());
  }
  return Sample(std::move(points), std::move(labels), std::move(ids));
}

void save_distance_matrix(const DistanceMatrix& m, const fs::path& path) {
  if (!m.is_symmetric()) throw DataError("refusing to save a non-symmetric distance matrix");
  std::vector<unsigned char> bytes;
  bytes.reserve(8 + 8 * m.data().size());
  put_le64(bytes, m.size());
  for (double v : m.data()) put_le64(bytes, std::bit_cast<std::uint64_t>(v));
  write_bytes(path, bytes);
}

DistanceMatrix load_distance_matrix(const fs::path& path) {
  const auto bytes = read_bytes(path);
  if (bytes.size() < 8) throw DataError(path.string() + ": truncated header");
  const std::uint64_t n = get_le64(bytes.data());
  const std::size_t body = bytes.size() - 8;
  if (n > (1ULL << 20) || body != 8 * n * n) {
    throw DataError(path.string() + ": header declares n=" + std::to_string(n) + " but file holds " +
                    std::to_string(body / 8) + " values");
  }
  std::vector<double> entries(n * n);
  for (std::size_t k = 0; k < entries.size(); ++k) {
    entries[k] = std::bit_cast<double>(get_le64(bytes.data() + 8 + 8 * k));
  }
  DistanceMatrix m(n, std::move(entries));
  try {
    m.validate();
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return m;
}

DataPoint load_tensor_file(const fs::path& path, const TensorShape& shape) {
  const auto bytes = read_bytes(path);
  PixelType type;
  if (bytes.size() == shape.elements()) {
    type = PixelType::u8;
  } else if (bytes.size() == 4 * shape.elements()) {
    type = PixelType::f32;
  } else {
    throw DataError(path.string() + ": size " + std::to_string(bytes.size()) +
                    " does not match shape " + shape.to_string());
  }
  try {
    return DataPoint(shape, decode_pixels(bytes.data(), shape.elements(), type));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

PrecomputedOrbits PrecomputedOrbits::load(const fs::path& manifest_path) {
  const json doc = read_json(manifest_path);
  if (!doc.is_object()) throw DataError(manifest_path.string() + ": orbit manifest must be an object");
  PrecomputedOrbits orbits;
  orbits.source_ = manifest_path;
  for (const auto& [key, list] : doc.items()) {
    std::size_t id = 0;
    try {
      std::size_t consumed = 0;
      id = std::stoull(key, &consumed);
      if (consumed != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      throw DataError(manifest_path.string() + ": key '" + key + "' is not a record index");
    }
    if (!list.is_array() || list.empty()) {
      throw DataError(manifest_path.string() + ": record " + key + " needs a nonempty list of files");
    }
    auto& files = orbits.files_[id];
    for (const auto& f : list) {
      if (!f.is_string()) throw DataError(manifest_path.string() + ": record " + key + ": paths must be strings");
      files.push_back(resolve(manifest_path, f.get<std::string>()));
    }
  }
  return orbits;
}

std::vector<DataPoint> PrecomputedOrbits::views(std::size_t record_id, const TensorShape& shape) const {
  const auto it = files_.find(record_id);
  if (it == files_.end()) {
    throw DataError(source_.string() + ": no precomputed orbit for record " + std::to_string(record_id));
  }
  std::vector<DataPoint> out;
  out.reserve(it->second.size());
  for (const auto& f : it->second) out.push_back(load_tensor_file(f, shape));
  return out;
}

std::vector<std::vector<double>> read_numeric_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t consumed = 0;
        row.push_back(std::stod(cell, &consumed));
        if (cell.find_first_not_of(" \t", consumed) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw DataError(path.string() + ":" + std::to_string(line_no) + ": not a number: '" + cell + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace scn
