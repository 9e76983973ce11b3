#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scn/distance_matrix.hpp"
#include "scn/tensor.hpp"

namespace scn {

/// An epsilon-sample cover: centers drawn from the sample and an assignment
/// of every index to a center within epsilon.
struct SampleCover {
  double epsilon = 0.0;
  std::vector<std::size_t> centers;     // sorted, distinct
  std::vector<std::size_t> assignment;  // assignment[i] is a center index
  std::size_t count() const noexcept { return centers.size(); }
};

struct UncoveredPoint {
  std::size_t index;
  std::size_t nearest_center;
  double distance;
};

/// Outcome of verify_cover: either a cover, or the points no center reaches.
struct CoverCheck {
  std::optional<SampleCover> cover;
  std::vector<UncoveredPoint> uncovered;
  bool valid() const noexcept { return cover.has_value(); }
};

/// Checks whether `centers` is an epsilon-cover under rho. Each point is
/// assigned to its nearest center, ties to the lowest index. Throws
/// UsageError for an empty or out-of-range center list.
CoverCheck verify_cover(const DistanceMatrix& rho, double epsilon, std::span<const std::size_t> centers);

enum class CoverAlgorithm { kmedoids, greedy, exact };

std::string to_string(CoverAlgorithm a);
CoverAlgorithm parse_algorithm(const std::string& name);

struct CoverEstimate {
  std::size_t count = 0;
  SampleCover cover;
};

/// Which cluster counts the k-medoids estimator tries.
struct KSchedule {
  enum class Mode { adaptive, full, list };
  Mode mode = Mode::adaptive;
  std::vector<std::size_t> ks;  // Mode::list only

  /// Every k from n down to 1.
  static KSchedule full() { return {Mode::full, {}}; }
  /// Full scan for n <= kAdaptiveFullScanLimit, else a geometric coarse grid
  /// refined around its best entry.
  static KSchedule adaptive() { return {Mode::adaptive, {}}; }
  static KSchedule of(std::vector<std::size_t> ks) { return {Mode::list, std::move(ks)}; }
};

inline constexpr std::size_t kAdaptiveFullScanLimit = 200;

enum class KMedoidsMethod {
  alternate,  // Park-Jun: reassign, then move each medoid to its cluster's 1-median
  swap,       // PAM: best single medoid/non-medoid exchange per iteration
};

struct KMedoidsOptions {
  KSchedule schedule = KSchedule::adaptive();
  KMedoidsMethod method = KMedoidsMethod::alternate;
  std::size_t max_iterations = 100;
  std::size_t restarts = 1;  // restart 0 uses the Park-Jun seeding, the rest random seeding
};

/// One k-medoids clustering of the rows of a distance matrix.
struct Clustering {
  std::vector<std::size_t> medoids;     // sorted
  std::vector<std::size_t> assignment;  // nearest medoid per point, ties to lowest index
  double total_cost = 0.0;
  std::size_t iterations = 0;
};

/// Park-Jun seeding order: indices sorted by sum_i d(i,j) / sum_l d(i,l).
std::vector<std::size_t> park_jun_order(const DistanceMatrix& d);

Clustering kmedoids(const DistanceMatrix& d, std::vector<std::size_t> initial_medoids,
                    KMedoidsMethod method = KMedoidsMethod::alternate, std::size_t max_iterations = 100);

/// The k values the schedule would evaluate for n points (before refinement
/// for the adaptive mode).
std::vector<std::size_t> schedule_ks(const KSchedule& s, std::size_t n);

/// Cover-count estimate via clustering: for each k in the schedule, cluster
/// into k medoids and count k plus the points farther than epsilon from their
/// medoid; return the smallest count and its cover (outliers become centers).
CoverEstimate scn_kmedoids(const DistanceMatrix& rho, double epsilon, std::uint64_t seed,
                           const KMedoidsOptions& options = {});

/// Greedy set cover over the balls {j : rho(i,j) <= epsilon}, ties to the
/// lowest index. Within a factor 1 + ln n of the optimum.
CoverEstimate scn_greedy(const DistanceMatrix& rho, double epsilon);

inline constexpr std::size_t kExactCoverLimit = 20;

/// Minimum cover by enumerating center subsets in increasing size. n <= 20.
CoverEstimate scn_exact(const DistanceMatrix& rho, double epsilon);

CoverEstimate estimate_cover(const DistanceMatrix& rho, double epsilon, CoverAlgorithm algorithm,
                             std::uint64_t seed, const KMedoidsOptions& options = {});

struct ScnRecord {
  double epsilon;
  std::size_t count;
  CoverAlgorithm algorithm;
  std::uint64_t seed;
};

using ScnCurve = std::vector<ScnRecord>;

/// One estimate per epsilon; epsilons must be nonempty and ascending.
ScnCurve scn_curve(const DistanceMatrix& rho, std::span<const double> epsilons, CoverAlgorithm algorithm,
                   std::uint64_t seed, const KMedoidsOptions& options = {});

/// Smallest entry over pairs with different labels. Throws DataError when
/// fewer than two classes are present.
double min_interclass_distance(const DistanceMatrix& d, std::span<const Label> labels);

struct NormalizedScn {
  std::size_t count = 0;
  double ratio = 1.0;              // min inter-class d_G / min inter-class Euclidean
  double effective_epsilon = 0.0;  // ratio * epsilon
  bool reliable = true;            // false when the ratio is zero or undefined
};

/// Cover count at the rescaled resolution ratio * epsilon, where ratio
/// compares the minimum inter-class distance after the transformation
/// (d_transformed) with the one before (d_base). A zero or undefined ratio is
/// flagged unreliable; an undefined ratio falls back to the raw resolution.
NormalizedScn normalized_scn(const DistanceMatrix& rho, const DistanceMatrix& d_transformed,
                             const DistanceMatrix& d_base, std::span<const Label> labels, double epsilon,
                             CoverAlgorithm algorithm, std::uint64_t seed, const KMedoidsOptions& options = {});

}  // namespace scn
