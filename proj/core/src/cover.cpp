#include "scn/cover.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "scn/error.hpp"
#include "scn/parallel.hpp"
#include "scn/rng.hpp"

namespace scn {
namespace {

void check_epsilon(double epsilon) {
  if (!(epsilon >= 0.0) || std::isnan(epsilon)) throw UsageError("epsilon must be nonnegative");
}

std::size_t nearest_of(const DistanceMatrix& d, std::size_t p, std::span<const std::size_t> sorted_centers) {
  std::size_t best = sorted_centers.front();
  double best_d = d(p, best);
  for (std::size_t c : sorted_centers.subspan(1)) {
    if (d(p, c) < best_d) {
      best_d = d(p, c);
      best = c;
    }
  }
  return best;
}

SampleCover cover_from_centers(const DistanceMatrix& rho, double epsilon, std::vector<std::size_t> centers) {
  auto check = verify_cover(rho, epsilon, centers);
  if (!check.valid()) throw std::logic_error("internal error: estimator produced an invalid cover");
  return std::move(*check.cover);
}

std::vector<std::size_t> random_medoids(std::size_t n, std::size_t k, std::uint64_t seed, std::size_t restart) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Stream s({seed, 0x6b6d6564ULL, k, restart});
  for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + s.below(n - i)]);
  idx.resize(k);
  return idx;
}

struct KOutcome {
  std::size_t k = 0;
  std::size_t count = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> centers;
};

KOutcome evaluate_k(const DistanceMatrix& rho, double epsilon, std::size_t k, std::span<const std::size_t> order,
                    std::uint64_t seed, const KMedoidsOptions& opt) {
  KOutcome best;
  best.k = k;
  for (std::size_t r = 0; r < std::max<std::size_t>(1, opt.restarts); ++r) {
    std::vector<std::size_t> init =
        r == 0 ? std::vector<std::size_t>(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k))
               : random_medoids(rho.size(), k, seed, r);
    const Clustering cl = kmedoids(rho, std::move(init), opt.method, opt.max_iterations);
    std::vector<std::size_t> centers = cl.medoids;
    for (std::size_t p = 0; p < rho.size(); ++p) {
      if (rho(p, cl.assignment[p]) > epsilon) centers.push_back(p);
    }
    if (centers.size() < best.count) {
      best.count = centers.size();
      best.centers = std::move(centers);
    }
  }
  return best;
}

std::vector<std::size_t> geometric_grid(std::size_t n) {
  std::vector<std::size_t> ks;
  for (std::size_t k = n; k >= 1;) {
    ks.push_back(k);
    if (k == 1) break;
    k = std::min(k - 1, static_cast<std::size_t>(std::floor(static_cast<double>(k) * 0.9)));
    k = std::max<std::size_t>(k, 1);
  }
  return ks;
}

}  // namespace

CoverCheck verify_cover(const DistanceMatrix& rho, double epsilon, std::span<const std::size_t> centers) {
  check_epsilon(epsilon);
  if (centers.empty()) throw UsageError("cover needs at least one center");
  std::vector<std::size_t> sorted(centers.begin(), centers.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  if (sorted.back() >= rho.size()) throw UsageError("center index out of range");

  CoverCheck out;
  SampleCover cover{epsilon, sorted, std::vector<std::size_t>(rho.size())};
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const std::size_t c = nearest_of(rho, i, sorted);
    cover.assignment[i] = c;
    if (rho(i, c) > epsilon) out.uncovered.push_back({i, c, rho(i, c)});
  }
  if (out.uncovered.empty()) out.cover = std::move(cover);
  return out;
}

std::string to_string(CoverAlgorithm a) {
  switch (a) {
    case CoverAlgorithm::kmedoids: return "kmedoids";
    case CoverAlgorithm::greedy: return "greedy";
    case CoverAlgorithm::exact: return "exact";
  }
  return "unknown";
}

CoverAlgorithm parse_algorithm(const std::string& name) {
  if (name == "kmedoids") return CoverAlgorithm::kmedoids;
  if (name == "greedy") return CoverAlgorithm::greedy;
  if (name == "exact") return CoverAlgorithm::exact;
  throw UsageError("unknown cover algorithm '" + name + "'");
}

std::vector<std::size_t> park_jun_order(const DistanceMatrix& d) {
  const std::size_t n = d.size();
  std::vector<double> row_sum(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (double v : d.row(i)) row_sum[i] += v;
  }
  std::vector<double> score(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      if (row_sum[i] > 0.0) score[j] += d(i, j) / row_sum[i];
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] < score[b]; });
  return order;
}

Clustering kmedoids(const DistanceMatrix& d, std::vector<std::size_t> medoids, KMedoidsMethod method,
                    std::size_t max_iterations) {
  const std::size_t n = d.size();
  std::sort(medoids.begin(), medoids.end());
  medoids.erase(std::unique(medoids.begin(), medoids.end()), medoids.end());
  if (medoids.empty() || medoids.back() >= n) throw UsageError("invalid initial medoids");

  Clustering out;
  auto assign = [&] {
    out.assignment.assign(n, 0);
    out.total_cost = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      out.assignment[p] = nearest_of(d, p, medoids);
      out.total_cost += d(p, out.assignment[p]);
    }
  };

  if (method == KMedoidsMethod::alternate) {
    std::vector<std::vector<std::size_t>> members;
    for (out.iterations = 0; out.iterations < max_iterations; ++out.iterations) {
      assign();
      members.assign(n, {});
      for (std::size_t p = 0; p < n; ++p) members[out.assignment[p]].push_back(p);
      bool changed = false;
      std::vector<std::size_t> next;
      next.reserve(medoids.size());
      for (std::size_t m : medoids) {
        const auto& cl = members[m];
        auto cost_of = [&](std::size_t c) {
          double s = 0.0;
          for (std::size_t p : cl) s += d(c, p);
          return s;
        };
        std::size_t best = m;
        double best_cost = cost_of(m);
        for (std::size_t c : cl) {
          const double cost = cost_of(c);
          if (cost < best_cost) {
            best = c;
            best_cost = cost;
          }
        }
        changed |= best != m;
        next.push_back(best);
      }
      if (!changed) break;
      std::sort(next.begin(), next.end());
      medoids = std::move(next);
    }
  } else {
    std::vector<char> is_medoid(n, 0);
    for (out.iterations = 0; out.iterations < max_iterations; ++out.iterations) {
      std::fill(is_medoid.begin(), is_medoid.end(), 0);
      for (std::size_t m : medoids) is_medoid[m] = 1;
      // Nearest and second-nearest medoid distance per point.
      std::vector<std::size_t> near(n);
      std::vector<double> d1(n), d2(n);
      for (std::size_t p = 0; p < n; ++p) {
        d1[p] = d2[p] = std::numeric_limits<double>::infinity();
        for (std::size_t m : medoids) {
          const double v = d(p, m);
          if (v < d1[p]) {
            d2[p] = d1[p];
            d1[p] = v;
            near[p] = m;
          } else if (v < d2[p]) {
            d2[p] = v;
          }
        }
      }
      double best_delta = 0.0;
      std::size_t swap_out = n, swap_in = n;
      for (std::size_t mi = 0; mi < medoids.size(); ++mi) {
        const std::size_t m = medoids[mi];
        for (std::size_t o = 0; o < n; ++o) {
          if (is_medoid[o]) continue;
          double delta = 0.0;
          for (std::size_t p = 0; p < n; ++p) {
            const double to_o = d(p, o);
            const double now = near[p] == m ? std::min(to_o, d2[p]) : std::min(to_o, d1[p]);
            delta += now - d1[p];
          }
          if (delta < best_delta) {
            best_delta = delta;
            swap_out = mi;
            swap_in = o;
          }
        }
      }
      if (swap_in == n) break;
      medoids[swap_out] = swap_in;
      std::sort(medoids.begin(), medoids.end());
    }
  }
  assign();
  out.medoids = std::move(medoids);
  return out;
}

std::vector<std::size_t> schedule_ks(const KSchedule& s, std::size_t n) {
  std::vector<std::size_t> ks;
  switch (s.mode) {
    case KSchedule::Mode::list:
      for (std::size_t k : s.ks) {
        if (k < 1 || k > n) throw UsageError("schedule entry k=" + std::to_string(k) + " outside [1, n]");
      }
      return s.ks;
    case KSchedule::Mode::full:
      for (std::size_t k = n; k >= 1; --k) ks.push_back(k);
      return ks;
    case KSchedule::Mode::adaptive:
      if (n <= kAdaptiveFullScanLimit) return schedule_ks(KSchedule::full(), n);
      return geometric_grid(n);
  }
  return ks;
}

CoverEstimate scn_kmedoids(const DistanceMatrix& rho, double epsilon, std::uint64_t seed,
                           const KMedoidsOptions& options) {
  check_epsilon(epsilon);
  const std::size_t n = rho.size();
  if (n == 0) throw UsageError("empty distance matrix");
  const std::vector<std::size_t> ks = schedule_ks(options.schedule, n);
  if (ks.empty()) throw UsageError("empty k schedule");
  const std::vector<std::size_t> order = park_jun_order(rho);

  auto run = [&](const std::vector<std::size_t>& list) {
    std::vector<KOutcome> results(list.size());
    parallel_for(0, list.size(), [&](std::size_t i) {
      results[i] = evaluate_k(rho, epsilon, list[i], order, seed, options);
    });
    return results;
  };
  // Smallest count wins; ties keep the earlier schedule entry.
  auto best_of = [](const std::vector<KOutcome>& rs) {
    std::size_t b = 0;
    for (std::size_t i = 1; i < rs.size(); ++i)
      if (rs[i].count < rs[b].count) b = i;
    return b;
  };

  std::vector<KOutcome> results = run(ks);
  std::size_t b = best_of(results);
  if (options.schedule.mode == KSchedule::Mode::adaptive && n > kAdaptiveFullScanLimit) {
    const std::size_t hi = b > 0 ? ks[b - 1] - 1 : ks[b];
    const std::size_t lo = b + 1 < ks.size() ? ks[b + 1] + 1 : ks[b];
    std::vector<std::size_t> refine;
    for (std::size_t k = hi; k >= lo && k >= 1; --k) {
      if (k != ks[b]) refine.push_back(k);
      if (k == 1) break;
    }
    std::vector<KOutcome> extra = run(refine);
    // Merge in descending k so ties resolve toward the larger k, as a full scan would.
    results.insert(results.end(), std::make_move_iterator(extra.begin()), std::make_move_iterator(extra.end()));
    std::stable_sort(results.begin(), results.end(), [](const KOutcome& x, const KOutcome& y) { return x.k > y.k; });
    b = best_of(results);
  }
  CoverEstimate est;
  est.count = results[b].count;
  est.cover = cover_from_centers(rho, epsilon, std::move(results[b].centers));
  return est;
}

CoverEstimate scn_greedy(const DistanceMatrix& rho, double epsilon) {
  check_epsilon(epsilon);
  const std::size_t n = rho.size();
  if (n == 0) throw UsageError("empty distance matrix");
  const std::size_t words = (n + 63) / 64;
  std::vector<std::uint64_t> balls(n * words, 0);
  parallel_for(0, n, [&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j)
      if (rho(i, j) <= epsilon) balls[i * words + j / 64] |= 1ULL << (j % 64);
  });
  std::vector<std::uint64_t> uncovered(words, 0);
  for (std::size_t j = 0; j < n; ++j) uncovered[j / 64] |= 1ULL << (j % 64);
  std::size_t remaining = n;
  std::vector<std::size_t> centers;
  while (remaining > 0) {
    std::size_t best = n, best_gain = 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t gain = 0;
      for (std::size_t w = 0; w < words; ++w) gain += std::popcount(balls[i * words + w] & uncovered[w]);
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    centers.push_back(best);
    for (std::size_t w = 0; w < words; ++w) uncovered[w] &= ~balls[best * words + w];
    remaining -= best_gain;
  }
  CoverEstimate est;
  est.count = centers.size();
  est.cover = cover_from_centers(rho, epsilon, std::move(centers));
  return est;
}

CoverEstimate scn_exact(const DistanceMatrix& rho, double epsilon) {
  check_epsilon(epsilon);
  const std::size_t n = rho.size();
  if (n == 0) throw UsageError("empty distance matrix");
  if (n > kExactCoverLimit) {
    throw UsageError("exact cover is limited to n <= " + std::to_string(kExactCoverLimit) + ", got " +
                     std::to_string(n));
  }
  std::vector<std::uint32_t> ball(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (rho(i, j) <= epsilon) ball[i] |= 1U << j;
  const std::uint32_t full = n == 32 ? ~0U : ((1U << n) - 1U);

  for (std::size_t k = 1; k <= n; ++k) {
    std::vector<std::size_t> pick(k);
    std::iota(pick.begin(), pick.end(), 0);
    for (;;) {
      std::uint32_t covered = 0;
      for (std::size_t c : pick) covered |= ball[c];
      if (covered == full) {
        CoverEstimate est;
        est.count = k;
        est.cover = cover_from_centers(rho, epsilon, pick);
        return est;
      }
      // Next k-combination in lexicographic order.
      std::size_t pos = k;
      while (pos > 0 && pick[pos - 1] == n - k + pos - 1) --pos;
      if (pos == 0) break;
      ++pick[pos - 1];
      for (std::size_t q = pos; q < k; ++q) pick[q] = pick[q - 1] + 1;
    }
  }
  throw std::logic_error("internal error: the full index set always covers");
}

CoverEstimate estimate_cover(const DistanceMatrix& rho, double epsilon, CoverAlgorithm algorithm,
                             std::uint64_t seed, const KMedoidsOptions& options) {
  switch (algorithm) {
    case CoverAlgorithm::kmedoids: return scn_kmedoids(rho, epsilon, seed, options);
    case CoverAlgorithm::greedy: return scn_greedy(rho, epsilon);
    case CoverAlgorithm::exact: return scn_exact(rho, epsilon);
  }
  throw UsageError("unknown algorithm");
}

ScnCurve scn_curve(const DistanceMatrix& rho, std::span<const double> epsilons, CoverAlgorithm algorithm,
                   std::uint64_t seed, const KMedoidsOptions& options) {
  if (epsilons.empty()) throw UsageError("epsilon grid is empty");
  if (!std::is_sorted(epsilons.begin(), epsilons.end())) throw UsageError("epsilon grid must be ascending");
  ScnCurve curve;
  for (double eps : epsilons) {
    curve.push_back({eps, estimate_cover(rho, eps, algorithm, seed, options).count, algorithm, seed});
  }
  return curve;
}

double min_interclass_distance(const DistanceMatrix& d, std::span<const Label> labels) {
  if (labels.size() != d.size()) throw DataError("label count mismatch with distance matrix");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = i + 1; j < d.size(); ++j)
      if (labels[i] != labels[j]) best = std::min(best, d(i, j));
  if (!std::isfinite(best)) throw DataError("minimum inter-class distance needs at least two classes");
  return best;
}

NormalizedScn normalized_scn(const DistanceMatrix& rho, const DistanceMatrix& d_transformed,
                             const DistanceMatrix& d_base, std::span<const Label> labels, double epsilon,
                             CoverAlgorithm algorithm, std::uint64_t seed, const KMedoidsOptions& options) {
  check_epsilon(epsilon);
  const double after = min_interclass_distance(d_transformed, labels);
  const double before = min_interclass_distance(d_base, labels);
  NormalizedScn out;
  if (before > 0.0) {
    out.ratio = after / before;
    out.reliable = out.ratio > 0.0;
  } else {
    out.ratio = std::numeric_limits<double>::quiet_NaN();
    out.reliable = false;
  }
  out.effective_epsilon = std::isfinite(out.ratio) ? out.ratio * epsilon : epsilon;
  out.count = estimate_cover(rho, out.effective_epsilon, algorithm, seed, options).count;
  return out;
}

}  // namespace scn
