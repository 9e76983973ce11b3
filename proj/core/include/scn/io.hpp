#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "scn/distance_matrix.hpp"
#include "scn/tensor.hpp"

namespace scn {

enum class PixelType { u8, f32 };

/// Parsed dataset manifest:
///   { "shape": [H,W,C], "dtype": "u8"|"f32", "records": <path>, "labels": <path> }
/// Relative paths are resolved against the manifest's directory.
struct DatasetManifest {
  TensorShape shape;
  PixelType dtype = PixelType::u8;
  std::filesystem::path records;
  std::filesystem::path labels;
};

DatasetManifest parse_manifest(const std::filesystem::path& path);
Sample load_manifest(const std::filesystem::path& path);

/// Writes records + labels files and a manifest pointing at them (u8 when
/// every value is an exact multiple of 1/255, else f32).
void save_manifest(const Sample& sample, const std::filesystem::path& manifest_path);

inline constexpr std::size_t kCifarSide = 32;
inline constexpr std::size_t kCifarRecordBytes = 1 + 3 * kCifarSide * kCifarSide;

/// Reads a CIFAR-10 binary batch: 3073-byte records of one label byte and
/// 1024 red, 1024 green, 1024 blue bytes. Output is channel-last, byte/255.
/// `first_id` offsets the record ids so several batches can be concatenated.
Sample load_cifar_batch(const std::filesystem::path& path, std::size_t first_id = 0);
Sample load_cifar_batches(const std::vector<std::filesystem::path>& paths);

/// Distance matrix file: little-endian u64 n, then n*n little-endian f64,
/// row-major. Saving refuses non-symmetric input; loading validates length
/// and the matrix invariants.
void save_distance_matrix(const DistanceMatrix& m, const std::filesystem::path& path);
DistanceMatrix load_distance_matrix(const std::filesystem::path& path);

/// Precomputed orbits: JSON object mapping a record id (as a decimal string)
/// to a list of raw tensor files, each of the sample's shape. Element type is
/// inferred from the file size (1 byte per element -> u8, 4 -> f32).
class PrecomputedOrbits {
 public:
  static PrecomputedOrbits load(const std::filesystem::path& manifest_path);

  /// Loads the listed views of one record; throws DataError if the record is
  /// absent or a file is unreadable or of the wrong size.
  std::vector<DataPoint> views(std::size_t record_id, const TensorShape& shape) const;

  const std::filesystem::path& source() const noexcept { return source_; }
  std::size_t records() const noexcept { return files_.size(); }

 private:
  std::filesystem::path source_;
  std::map<std::size_t, std::vector<std::filesystem::path>> files_;
};

/// Raw tensor file of `shape` elements, u8 (scaled by 1/255) or f32.
DataPoint load_tensor_file(const std::filesystem::path& path, const TensorShape& shape);

/// Reads a numeric CSV (no header) into rows.
std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path& path);

}  // namespace scn
