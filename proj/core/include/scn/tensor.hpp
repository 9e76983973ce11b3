#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace scn {

/// Height x width x channels of an image-like tensor.
struct TensorShape {
  std::size_t height = 1;
  std::size_t width = 1;
  std::size_t channels = 1;

  std::size_t elements() const noexcept { return height * width * channels; }
  std::string to_string() const;

  friend bool operator==(const TensorShape&, const TensorShape&) = default;
};

/// Throws UsageError unless every dimension is at least 1.
TensorShape make_shape(std::size_t height, std::size_t width, std::size_t channels);

/// One data point: channel-last, row-major intensities in [0,1].
class DataPoint {
 public:
  DataPoint() = default;
  /// Validates length and finiteness; throws DataError otherwise.
  DataPoint(TensorShape shape, std::vector<float> values);

  const TensorShape& shape() const noexcept { return shape_; }
  std::span<const float> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }

  float at(std::size_t row, std::size_t col, std::size_t ch) const noexcept {
    return values_[(row * shape_.width + col) * shape_.channels + ch];
  }

  friend bool operator==(const DataPoint&, const DataPoint&) = default;

 private:
  TensorShape shape_;
  std::vector<float> values_;
};

using Label = std::uint16_t;

/// An ordered, nonempty, shape-homogeneous collection of labelled points.
/// `ids` are stable record identifiers (the index into the source dataset);
/// they key per-point random streams and precomputed orbits so that a point's
/// orbit does not depend on which subset it was drawn into.
class Sample {
 public:
  Sample() = default;
  Sample(std::vector<DataPoint> points, std::vector<Label> labels);
  Sample(std::vector<DataPoint> points, std::vector<Label> labels, std::vector<std::size_t> ids);

  std::size_t size() const noexcept { return points_.size(); }
  const TensorShape& shape() const noexcept { return points_.front().shape(); }
  const DataPoint& point(std::size_t i) const { return points_.at(i); }
  const std::vector<DataPoint>& points() const noexcept { return points_; }
  const std::vector<Label>& labels() const noexcept { return labels_; }
  const std::vector<std::size_t>& ids() const noexcept { return ids_; }

  /// Sub-sample keeping the listed positions (in the given order) and their ids.
  Sample subset(std::span<const std::size_t> positions) const;

  friend bool operator==(const Sample&, const Sample&) = default;

 private:
  std::vector<DataPoint> points_;
  std::vector<Label> labels_;
  std::vector<std::size_t> ids_;
};

/// Euclidean distance accumulated in double precision.
double euclidean_distance(std::span<const float> a, std::span<const float> b);

}  // namespace scn
