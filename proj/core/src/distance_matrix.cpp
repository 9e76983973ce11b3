#include "scn/distance_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "scn/error.hpp"

namespace scn {

DistanceMatrix::DistanceMatrix(std::size_t n, std::vector<double> row_major)
    : n_(n), entries_(std::move(row_major)) {
  if (entries_.size() != n_ * n_) {
    throw DataError("distance matrix of size " + std::to_string(n_) + " needs " +
                    std::to_string(n_ * n_) + " entries, got " + std::to_string(entries_.size()));
  }
}

double DistanceMatrix::max_entry() const noexcept {
  return entries_.empty() ? 0.0 : *std::max_element(entries_.begin(), entries_.end());
}

bool DistanceMatrix::is_symmetric() const noexcept {
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j)
      if ((*this)(i, j) != (*this)(j, i)) return false;
  return true;
}

void DistanceMatrix::validate() const {
  for (std::size_t i = 0; i < n_; ++i) {
    if ((*this)(i, i) != 0.0) {
      throw DataError("distance matrix has nonzero diagonal at " + std::to_string(i));
    }
    for (std::size_t j = 0; j < n_; ++j) {
      const double v = (*this)(i, j);
      if (!std::isfinite(v) || v < 0.0) {
        throw DataError("distance matrix entry (" + std::to_string(i) + "," + std::to_string(j) +
                        ") is negative or non-finite");
      }
      if (v != (*this)(j, i)) {
        throw DataError("distance matrix is not symmetric at (" + std::to_string(i) + "," +
                        std::to_string(j) + ")");
      }
    }
  }
}

}  // namespace scn
