#include "scn/orbit_metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "scn/error.hpp"
#include "scn/parallel.hpp"

namespace scn {
namespace {

constexpr std::size_t kExitBlock = 128;

// Squared distance between a and b, giving up (and returning a value >= bound)
// as soon as a partial sum reaches bound. Partial sums of squares are
// nondecreasing, so an abandoned pair can never beat the running minimum, and
// the winning pair is always summed in full in the same order.
double squared_distance_bounded(const float* a, const float* b, std::size_t dim, double bound) {
  double acc = 0.0;
  std::size_t k = 0;
  while (k < dim) {
    const std::size_t stop = std::min(dim, k + kExitBlock);
    for (; k < stop; ++k) {
      const double d = static_cast<double>(a[k]) - static_cast<double>(b[k]);
      acc += d * d;
    }
    if (acc >= bound) return acc;
  }
  return acc;
}

}  // namespace

DistanceMatrix euclidean_distances(const Sample& sample) {
  const std::size_t n = sample.size();
  DistanceMatrix m(n);
  parallel_for(0, n, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = euclidean_distance(sample.point(i).values(), sample.point(j).values());
      m(i, j) = d;
    }
  });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) m(j, i) = m(i, j);
  return m;
}

double orbit_distance(const Orbit& a, const Orbit& b) {
  if (a.members.empty() || b.members.empty()) throw DataError("empty orbit");
  const std::size_t dim = a.members.front().size();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& ma : a.members) {
    if (ma.size() != dim) throw DataError("shape mismatch between orbit members");
    for (const auto& mb : b.members) {
      if (mb.size() != dim) throw DataError("shape mismatch between orbit members");
      const double sq = squared_distance_bounded(ma.values().data(), mb.values().data(), dim, best);
      if (sq < best) {
        best = sq;
        if (best == 0.0) return 0.0;
      }
    }
  }
  return std::sqrt(best);
}

DistanceMatrix direct_orbit_distances(std::span<const Orbit> orbits) {
  const std::size_t n = orbits.size();
  DistanceMatrix m(n);
  parallel_for(0, n, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) m(i, j) = orbit_distance(orbits[i], orbits[j]);
  });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) m(j, i) = m(i, j);
  return m;
}

DistanceMatrix direct_orbit_distances(const Sample& sample, const TransformSpec& spec, std::uint64_t seed) {
  std::vector<Orbit> orbits(sample.size());
  parallel_for(0, sample.size(), [&](std::size_t i) {
    orbits[i] = materialize_orbit(sample.point(i), spec, seed, sample.ids()[i]);
  });
  return direct_orbit_distances(orbits);
}

DistanceMatrix shortest_path_metric(const DistanceMatrix& d) {
  d.validate();
  const std::size_t n = d.size();
  DistanceMatrix edges = d;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (edges(i, j) < kZeroDistance) edges(i, j) = 0.0;

  DistanceMatrix directed(n);
  parallel_for(0, n, [&](std::size_t s) {
    std::vector<double> dist(edges.row(s).begin(), edges.row(s).end());
    std::vector<char> done(n, 0);
    dist[s] = 0.0;
    for (std::size_t round = 0; round < n; ++round) {
      std::size_t u = n;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t v = 0; v < n; ++v) {
        if (!done[v] && dist[v] < best) {
          best = dist[v];
          u = v;
        }
      }
      if (u == n) break;
      done[u] = 1;
      const auto row = edges.row(u);
      for (std::size_t v = 0; v < n; ++v) {
        if (!done[v]) {
          const double via = best + row[v];
          if (via < dist[v]) dist[v] = via;
        }
      }
    }
    for (std::size_t t = 0; t < n; ++t) directed(s, t) = dist[t];
  });

  DistanceMatrix rho(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) rho.set_symmetric(i, j, std::min(directed(i, j), directed(j, i)));
  return rho;
}

}  // namespace scn
