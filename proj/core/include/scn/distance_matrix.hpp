#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace scn {

/// Dense symmetric n x n matrix of nonnegative distances with zero diagonal.
/// Construction does not validate; call validate() (or the file loader) to
/// enforce the invariants.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n) : n_(n), entries_(n * n, 0.0) {}
  DistanceMatrix(std::size_t n, std::vector<double> row_major);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return entries_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return entries_[i * n_ + j]; }

  std::span<const double> row(std::size_t i) const noexcept { return {entries_.data() + i * n_, n_}; }
  std::span<const double> data() const noexcept { return entries_; }

  /// Sets (i,j) and (j,i).
  void set_symmetric(std::size_t i, std::size_t j, double v) noexcept {
    entries_[i * n_ + j] = v;
    entries_[j * n_ + i] = v;
  }

  double max_entry() const noexcept;
  bool is_symmetric() const noexcept;

  /// Throws DataError if the matrix is not symmetric, has a nonzero diagonal,
  /// or holds negative or non-finite entries.
  void validate() const;

  friend bool operator==(const DistanceMatrix&, const DistanceMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> entries_;
};

}  // namespace scn
