#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "scn/distance_matrix.hpp"
#include "scn/tensor.hpp"
#include "scn/transforms.hpp"

namespace scn {

/// Edges shorter than this are treated as exact orbit coincidences (cost 0).
inline constexpr double kZeroDistance = 1e-12;

/// Pairwise Euclidean distances between the points of a sample.
DistanceMatrix euclidean_distances(const Sample& sample);

/// Minimum Euclidean distance between two finite orbits.
double orbit_distance(const Orbit& a, const Orbit& b);

/// d_G for every pair: the minimum over the Cartesian product of the two
/// materialized orbits. Exact for finite transformation sets, an upper bound
/// on the infimum for sampled continuous ones. Orbits are materialized once
/// per point (keyed by the point's id) before any pair is evaluated.
DistanceMatrix direct_orbit_distances(const Sample& sample, const TransformSpec& spec, std::uint64_t seed);

/// Same, from already materialized orbits.
DistanceMatrix direct_orbit_distances(std::span<const Orbit> orbits);

/// Shortest-path closure of a complete graph with edge costs d: entry (s,t)
/// is the cheapest path cost from s to t. Dense Dijkstra from every source,
/// O(n^3) total. Edges below kZeroDistance are set to 0 first; the result is
/// made exactly symmetric by taking the smaller of the two directed answers.
DistanceMatrix shortest_path_metric(const DistanceMatrix& d);

}  // namespace scn
