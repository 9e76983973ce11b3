#include "scn/tensor.hpp"

#include <cmath>

#include "scn/error.hpp"

namespace scn {

std::string TensorShape::to_string() const {
  return std::to_string(height) + "x" + std::to_string(width) + "x" + std::to_string(channels);
}

TensorShape make_shape(std::size_t height, std::size_t width, std::size_t channels) {
  if (height == 0 || width == 0 || channels == 0) {
    throw UsageError("tensor dimensions must be positive");
  }
  return {height, width, channels};
}

DataPoint::DataPoint(TensorShape shape, std::vector<float> values)
    : shape_(shape), values_(std::move(values)) {
  if (shape_.height == 0 || shape_.width == 0 || shape_.channels == 0) {
    throw DataError("data point has an empty dimension");
  }
  if (values_.size() != shape_.elements()) {
    throw DataError("data point has " + std::to_string(values_.size()) + " values, shape " +
                    shape_.to_string() + " needs " + std::to_string(shape_.elements()));
  }
  for (float v : values_) {
    if (!std::isfinite(v)) throw DataError("data point holds a non-finite value");
  }
}

Sample::Sample(std::vector<DataPoint> points, std::vector<Label> labels)
    : Sample(std::move(points), std::move(labels), {}) {}

Sample::Sample(std::vector<DataPoint> points, std::vector<Label> labels,
               std::vector<std::size_t> ids)
    : points_(std::move(points)), labels_(std::move(labels)), ids_(std::move(ids)) {
  if (points_.empty()) throw DataError("sample is empty");
  if (labels_.size() != points_.size()) {
    throw DataError("label count mismatch: " + std::to_string(labels_.size()) + " labels for " +
                    std::to_string(points_.size()) + " points");
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i].shape() != points_.front().shape()) {
      throw DataError("shape mismatch at record " + std::to_string(i) + ": " +
                      points_[i].shape().to_string() + " vs " +
                      points_.front().shape().to_string());
    }
  }
  if (ids_.empty()) {
    ids_.resize(points_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) ids_[i] = i;
  } else if (ids_.size() != points_.size()) {
    throw DataError("id count does not match point count");
  }
}

Sample Sample::subset(std::span<const std::size_t> positions) const {
  std::vector<DataPoint> pts;
  std::vector<Label> labs;
  std::vector<std::size_t> ids;
  pts.reserve(positions.size());
  for (std::size_t p : positions) {
    if (p >= size()) throw UsageError("subset position out of range");
    pts.push_back(points_[p]);
    labs.push_back(labels_[p]);
    ids.push_back(ids_[p]);
  }
  return Sample(std::move(pts), std::move(labs), std::move(ids));
}

double euclidean_distance(std::span<const float> a, std::span<const float> b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = static_cast<double>(a[k]) - static_cast<double>(b[k]);
    acc += d * d;
  }
  return std::sqrt(acc);
}

}  // namespace scn
