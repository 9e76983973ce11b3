#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "oracles.hpp"
#include "scn/cover.hpp"
#include "scn/error.hpp"
#include "scn/orbit_metric.hpp"
#include "scn/parallel.hpp"
#include "test_util.hpp"

using namespace scn;

namespace {

const DistanceMatrix kLine = testutil::line_metric({0, 1, 10, 11});
constexpr CoverAlgorithm kAll[] = {CoverAlgorithm::kmedoids, CoverAlgorithm::greedy, CoverAlgorithm::exact};

void check_valid(const DistanceMatrix& rho, const CoverEstimate& est, double eps) {
  CHECK(est.count == est.cover.count());
  const auto check = verify_cover(rho, eps, est.cover.centers);
  REQUIRE(check.valid());
  for (std::size_t i = 0; i < rho.size(); ++i) CHECK(rho(i, est.cover.assignment[i]) <= eps);
}

// Euclidean points in the plane, shortest-path closed.
DistanceMatrix random_metric(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<std::pair<double, double>> pts(n);
  for (auto& p : pts) p = {u(rng), u(rng)};
  DistanceMatrix d(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      d.set_symmetric(i, j, std::hypot(pts[i].first - pts[j].first, pts[i].second - pts[j].second));
  return d;
}

}  // namespace

TEST_CASE("verify_cover on the line instance") {
  const std::vector<std::size_t> all{0, 1, 2, 3};
  const auto self = verify_cover(kLine, 0.0, all);
  REQUIRE(self.valid());
  CHECK(self.cover->assignment == all);

  const std::vector<std::size_t> two{0, 2};
  const auto ok = verify_cover(kLine, 1.0, two);
  REQUIRE(ok.valid());
  CHECK(ok.cover->assignment == std::vector<std::size_t>{0, 0, 2, 2});

  const std::vector<std::size_t> one{0};
  const auto bad = verify_cover(kLine, 1.0, one);
  CHECK_FALSE(bad.valid());
  REQUIRE(bad.uncovered.size() == 2);
  CHECK(bad.uncovered[0].index == 2);
  CHECK(bad.uncovered[0].distance == 10.0);
  CHECK(bad.uncovered[1].index == 3);
  CHECK(bad.uncovered[1].distance == 11.0);

  const std::vector<std::size_t> none, out_of_range{4};
  CHECK_THROWS_AS(verify_cover(kLine, 1.0, none), UsageError);
  CHECK_THROWS_AS(verify_cover(kLine, 1.0, out_of_range), UsageError);
  CHECK_THROWS_AS(verify_cover(kLine, -1.0, all), UsageError);
}

TEST_CASE("ties in assignment go to the lowest center index") {
  const DistanceMatrix d = testutil::line_metric({0, 1, 2});
  const std::vector<std::size_t> centers{2, 0};
  const auto c = verify_cover(d, 1.0, centers);
  REQUIRE(c.valid());
  CHECK(c.cover->centers == std::vector<std::size_t>{0, 2});
  CHECK(c.cover->assignment[1] == 0);
}

TEST_CASE("line instance counts for every algorithm") {
  for (auto algo : kAll) {
    CAPTURE(to_string(algo));
    const std::pair<double, std::size_t> cases[] = {{0.0, 4}, {1.0, 2}, {10.0, 1}, {11.0, 1}};
    for (auto [eps, expected] : cases) {
      const auto est = estimate_cover(kLine, eps, algo, 0);
      CHECK(est.count == expected);
      check_valid(kLine, est, eps);
    }
  }
  CHECK(scn_greedy(kLine, 10.0).cover.centers == std::vector<std::size_t>{1});
}

TEST_CASE("degenerate resolutions") {
  std::mt19937_64 rng(1);
  const DistanceMatrix d = testutil::random_distance_matrix(15, 1.0, 5.0, rng);
  for (auto algo : kAll) {
    CHECK(estimate_cover(d, d.max_entry(), algo, 0).count == 1);
    CHECK(estimate_cover(d, 0.0, algo, 0).count == 15);
  }
  CHECK(scn_exact(DistanceMatrix(1), 0.0).count == 1);
  CHECK_THROWS_AS(scn_exact(DistanceMatrix(21), 0.0), UsageError);
  CHECK_THROWS_AS(parse_algorithm("annealing"), UsageError);
  CHECK(parse_algorithm("greedy") == CoverAlgorithm::greedy);
}

TEST_CASE("exact agrees with brute-force enumeration; heuristics never undercut it") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + rng() % 12;
    const DistanceMatrix rho = shortest_path_metric(testutil::random_distance_matrix(n, 0.0, 10.0, rng));
    const auto grid = testutil::to_grid(rho);
    for (double eps : {1.0, 3.0, 6.0}) {
      const std::size_t exact = scn_exact(rho, eps).count;
      CHECK(exact == oracle::min_cover_bruteforce(grid, eps));
      const auto greedy = scn_greedy(rho, eps);
      const auto km = scn_kmedoids(rho, eps, 3);
      check_valid(rho, greedy, eps);
      check_valid(rho, km, eps);
      CHECK(greedy.count >= exact);
      CHECK(km.count >= exact);
      CHECK(static_cast<double>(greedy.count) <= (1.0 + std::log(static_cast<double>(n))) * static_cast<double>(exact));
    }
  }
}

TEST_CASE("curves: exact is non-increasing, heuristics within a slack of 2") {
  std::mt19937_64 rng(3);
  std::vector<double> eps;
  for (int i = 0; i <= 20; ++i) eps.push_back(0.5 * i);
  for (int trial = 0; trial < 10; ++trial) {
    const DistanceMatrix rho = random_metric(14, rng);
    for (auto algo : kAll) {
      const ScnCurve c = scn_curve(rho, eps, algo, 0);
      REQUIRE(c.size() == eps.size());
      const std::size_t slack = algo == CoverAlgorithm::exact ? 0 : 2;
      for (std::size_t i = 1; i < c.size(); ++i) CHECK(c[i].count <= c[i - 1].count + slack);
      for (const auto& r : c) CHECK((r.count >= 1 && r.count <= 14));
    }
  }
  const std::vector<double> empty, unsorted{2.0, 1.0}, single{100.0};
  CHECK_THROWS_AS(scn_curve(kLine, empty, CoverAlgorithm::greedy, 0), UsageError);
  CHECK_THROWS_AS(scn_curve(kLine, unsorted, CoverAlgorithm::greedy, 0), UsageError);
  const auto one = scn_curve(kLine, single, CoverAlgorithm::kmedoids, 5);
  REQUIRE(one.size() == 1);
  CHECK(one[0].count == 1);
  CHECK(one[0].seed == 5);
}

TEST_CASE("zero resolution counts distinct points") {
  std::vector<DataPoint> pts;
  const auto s = make_shape(1, 2, 1);
  for (float v : {0.0f, 0.5f, 0.0f, 1.0f, 0.5f, 0.0f}) pts.emplace_back(s, std::vector<float>{v, v});
  const Sample sample(pts, {0, 1, 0, 1, 0, 1});
  const DistanceMatrix rho = shortest_path_metric(euclidean_distances(sample));
  CHECK(scn_exact(rho, 0.0).count == 3);
  CHECK(scn_greedy(rho, 0.0).count == 3);
  CHECK(scn_kmedoids(rho, 0.0, 0).count >= 3);
}

TEST_CASE("k-medoids internals") {
  SUBCASE("park-jun order prefers central points") {
    const auto order = park_jun_order(testutil::line_metric({0, 4, 5, 6, 20}));
    CHECK(order.front() == 2);
    CHECK(order.back() == 4);
  }
  SUBCASE("two separated clusters are recovered by both update rules") {
    const DistanceMatrix d = testutil::line_metric({0, 1, 2, 100, 101, 102});
    for (auto method : {KMedoidsMethod::alternate, KMedoidsMethod::swap}) {
      const Clustering c = kmedoids(d, {0, 1}, method);
      CHECK(c.medoids == std::vector<std::size_t>{1, 4});
      CHECK(c.total_cost == 4.0);
    }
  }
  SUBCASE("swap result admits no improving single exchange") {
    std::mt19937_64 rng(4);
    const DistanceMatrix d = random_metric(20, rng);
    const Clustering c = kmedoids(d, {0, 1, 2}, KMedoidsMethod::swap, 1000);
    auto cost = [&](const std::vector<std::size_t>& meds) {
      double s = 0.0;
      for (std::size_t p = 0; p < 20; ++p) {
        double b = 1e300;
        for (auto m : meds) b = std::min(b, d(p, m));
        s += b;
      }
      return s;
    };
    CHECK(cost(c.medoids) == doctest::Approx(c.total_cost));
    for (std::size_t mi = 0; mi < c.medoids.size(); ++mi)
      for (std::size_t o = 0; o < 20; ++o) {
        auto alt = c.medoids;
        alt[mi] = o;
        CHECK(cost(alt) >= c.total_cost - 1e-9);
      }
  }
  SUBCASE("invalid initial medoids") { CHECK_THROWS_AS(kmedoids(kLine, {7}), UsageError); }
}

TEST_CASE("k schedules") {
  CHECK(schedule_ks(KSchedule::full(), 3) == std::vector<std::size_t>{3, 2, 1});
  CHECK(schedule_ks(KSchedule::adaptive(), 200) == schedule_ks(KSchedule::full(), 200));
  const auto grid = schedule_ks(KSchedule::adaptive(), 1000);
  CHECK(grid.front() == 1000);
  CHECK(grid.back() == 1);
  CHECK(grid.size() < 100);
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] < grid[i - 1]);
  CHECK_THROWS_AS(schedule_ks(KSchedule::of({0}), 5), UsageError);
  CHECK_THROWS_AS(scn_kmedoids(kLine, 1.0, 0, {KSchedule::of({}), KMedoidsMethod::alternate, 100, 1}), UsageError);

  KMedoidsOptions only_two;
  only_two.schedule = KSchedule::of({2});
  CHECK(scn_kmedoids(kLine, 1.0, 0, only_two).count == 2);
}

TEST_CASE("adaptive schedule on a larger instance") {
  std::mt19937_64 rng(5);
  const DistanceMatrix rho = random_metric(260, rng);
  const auto adaptive = scn_kmedoids(rho, 1.5, 0);
  KMedoidsOptions faithful;
  faithful.schedule = KSchedule::full();
  const auto full = scn_kmedoids(rho, 1.5, 0, faithful);
  check_valid(rho, adaptive, 1.5);
  check_valid(rho, full, 1.5);
  CHECK(full.count <= adaptive.count);
  CHECK(adaptive.count <= 260);
}

TEST_CASE("restarts and thread counts keep results deterministic") {
  std::mt19937_64 rng(6);
  const DistanceMatrix rho = random_metric(40, rng);
  KMedoidsOptions opt;
  opt.restarts = 3;
  set_worker_count(1);
  const auto a = scn_kmedoids(rho, 2.0, 9, opt);
  set_worker_count(4);
  const auto b = scn_kmedoids(rho, 2.0, 9, opt);
  set_worker_count(0);
  CHECK(a.cover.centers == b.cover.centers);
  CHECK(a.count <= scn_kmedoids(rho, 2.0, 9).count);
}

TEST_CASE("minimum inter-class distance") {
  // Two classes 5 apart, members 1 apart within each class.
  const DistanceMatrix d = testutil::line_metric({0, 1, 6, 7});
  const std::vector<Label> labels{0, 0, 1, 1};
  CHECK(min_interclass_distance(d, labels) == 5.0);
  const std::vector<Label> same{2, 2, 2, 2};
  CHECK_THROWS_AS(min_interclass_distance(d, same), DataError);
  const std::vector<Label> short_labels{0, 1};
  CHECK_THROWS_AS(min_interclass_distance(d, short_labels), DataError);
}

TEST_CASE("normalized covering number rescales the resolution") {
  std::mt19937_64 rng(7);
  const DistanceMatrix base = random_metric(12, rng);
  std::vector<Label> labels(12);
  for (std::size_t i = 0; i < 12; ++i) labels[i] = static_cast<Label>(i % 3);

  for (auto algo : kAll) {
    const auto same = normalized_scn(base, base, base, labels, 3.0, algo, 0);
    CHECK(same.ratio == 1.0);
    CHECK(same.reliable);
    CHECK(same.count == estimate_cover(base, 3.0, algo, 0).count);

    DistanceMatrix half(12);
    for (std::size_t i = 0; i < 12; ++i)
      for (std::size_t j = 0; j < 12; ++j) half(i, j) = 0.5 * base(i, j);
    const auto scaled = normalized_scn(half, half, base, labels, 3.0, algo, 0);
    CHECK(scaled.ratio == doctest::Approx(0.5));
    CHECK(scaled.effective_epsilon == doctest::Approx(1.5));
    CHECK(scaled.count == estimate_cover(half, 1.5, algo, 0).count);
  }

  DistanceMatrix collapsed = base;
  collapsed.set_symmetric(0, 1, 0.0);
  const auto degenerate = normalized_scn(base, collapsed, base, labels, 3.0, CoverAlgorithm::exact, 0);
  CHECK_FALSE(degenerate.reliable);
  CHECK(degenerate.ratio == 0.0);
}
