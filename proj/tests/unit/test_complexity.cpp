#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "scn/complexity.hpp"
#include "scn/error.hpp"
#include "test_util.hpp"

using namespace scn;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = g(rng);
  return m;
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("projector for the identity, a coordinate swap and a cyclic shift") {
  CHECK(max_abs(invariance_projector(Matrix::Identity(4, 4)) - Matrix::Identity(4, 4)) == 0.0);
  CHECK(max_abs(invariance_projector(flip_matrix(2)) - Matrix::Constant(2, 2, 0.5)) <= 1e-12);
  CHECK(max_abs(invariance_projector(cyclic_shift_matrix(3)) - Matrix::Constant(3, 3, 1.0 / 3.0)) <= 1e-12);

  Matrix diag = Matrix::Identity(2, 2);
  diag(0, 0) = -1.0;
  Matrix expected = Matrix::Zero(2, 2);
  expected(1, 1) = 1.0;
  CHECK(max_abs(invariance_projector(diag) - expected) <= 1e-12);

  CHECK_THROWS_AS(invariance_projector(Matrix::Zero(2, 3)), DataError);
  Matrix nan = Matrix::Identity(2, 2);
  nan(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(invariance_projector(nan), DataError);
}

TEST_CASE("projector agrees with a Gram-Schmidt construction") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 40; ++trial) {
    const auto d = static_cast<Eigen::Index>(2 + rng() % 9);
    const auto rank = static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(d));
    const Matrix a = Matrix::Identity(d, d) + random_matrix(d, rank, rng) * random_matrix(rank, d, rng);
    const Matrix p = invariance_projector(a);
    const Matrix ref = oracle::complement_projector_gram_schmidt(a - Matrix::Identity(d, d));
    CHECK(max_abs(p - ref) <= 1e-8);
  }
}

TEST_CASE("pseudo-inverse satisfies the Moore-Penrose conditions") {
  std::mt19937_64 rng(2);
  const Matrix m = random_matrix(6, 2, rng) * random_matrix(2, 5, rng);
  const Matrix p = pseudo_inverse(m);
  CHECK(max_abs(m * p * m - m) <= 1e-10);
  CHECK(max_abs(p * m * p - p) <= 1e-10);
  CHECK(max_abs((m * p).transpose() - m * p) <= 1e-10);
  CHECK(max_abs((p * m).transpose() - p * m) <= 1e-10);
  CHECK(max_abs(pseudo_inverse(Matrix::Zero(3, 3))) == 0.0);
}

TEST_CASE("lq norms") {
  Vector v(3);
  v << 3.0, -4.0, 0.0;
  CHECK(lq_norm(v, 1.0) == 7.0);
  CHECK(lq_norm(v, 2.0) == doctest::Approx(5.0));
  CHECK(lq_norm(v, kInf) == 4.0);
  CHECK(lq_norm(v, 3.0) == doctest::Approx(std::cbrt(91.0)));
}

TEST_CASE("general class: spec examples and exact enumeration") {
  const Matrix zeros = Matrix::Zero(3, 4);
  const auto z = rademacher_general(zeros, 1.0, 2.0, 10, 0);
  CHECK(z.value == 0.0);
  CHECK(z.std_error == 0.0);

  Matrix one(1, 2);
  one << 1.0, 0.0;
  const auto e1 = rademacher_general(one, 1.0, 2.0, 16, 3);
  CHECK(e1.value == 1.0);
  CHECK(e1.draws == 16);

  Matrix two(2, 2);
  two << 1.0, 0.0, 0.0, 1.0;
  CHECK(rademacher_general(two, 1.0, 2.0, 16, 3).value == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-15));
  CHECK(oracle::rademacher_l2_enumerated(two, 1.0) == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-15));

  std::mt19937_64 rng(3);
  const Matrix x = random_matrix(10, 3, rng);
  const auto mc = rademacher_general(x, 2.0, 2.0, 20000, 1);
  const double exact = oracle::rademacher_l2_enumerated(x, 2.0);
  CHECK(std::abs(mc.value - exact) <= 4.0 * mc.std_error);

  double mean = 0.0, ss = 0.0;
  for (double v : mc.per_draw) mean += v;
  mean /= static_cast<double>(mc.per_draw.size());
  for (double v : mc.per_draw) ss += (v - mean) * (v - mean);
  CHECK(mc.std_error == doctest::Approx(std::sqrt(ss / (mc.per_draw.size() - 1)) / std::sqrt(double(mc.draws))));

  CHECK_THROWS_AS(rademacher_general(x, 1.0, 2.0, 0, 0), UsageError);
  CHECK_THROWS_AS(rademacher_general(x, 1.0, 0.5, 10, 0), UsageError);
  CHECK_THROWS_AS(rademacher_general(Matrix(0, 3), 1.0, 2.0, 10, 0), UsageError);
  CHECK(rademacher_general(x, 1.0, kInf, 10, 0).value > 0.0);
}

TEST_CASE("sigma streams are shared by seed and draw") {
  std::mt19937_64 rng(4);
  const Matrix x = random_matrix(7, 3, rng);
  CHECK(rademacher_sum(x, 5, 2) == rademacher_sum(x, 5, 2));
  CHECK(rademacher_sum(x, 5, 2) != rademacher_sum(x, 5, 3));
  const auto a = rademacher_general(x, 1.0, 2.0, 50, 8);
  const auto b = rademacher_invariant_l2(x, Matrix::Identity(3, 3), 1.0, 50, 8);
  for (std::size_t t = 0; t < 50; ++t) CHECK(a.per_draw[t] == doctest::Approx(b.per_draw[t]).epsilon(1e-14));
}

TEST_CASE("l2 invariant class") {
  Matrix one(1, 2);
  one << 1.0, 0.0;
  Matrix diag = Matrix::Identity(2, 2);
  diag(0, 0) = -1.0;
  CHECK(rademacher_invariant_l2(one, diag, 1.0, 8, 0).value == 0.0);

  std::mt19937_64 rng(5);
  const Matrix x = random_matrix(12, 5, rng);
  const auto gen = rademacher_general(x, 1.0, 2.0, 100, 2);
  const auto inv = rademacher_invariant_l2(x, cyclic_shift_matrix(5), 1.0, 100, 2);
  for (std::size_t t = 0; t < 100; ++t) CHECK(inv.per_draw[t] <= gen.per_draw[t]);
  CHECK_THROWS_AS(rademacher_invariant_l2(x, Matrix::Identity(4, 4), 1.0, 10, 0), DataError);
}

TEST_CASE("descent gradient matches central differences") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    const auto d = static_cast<Eigen::Index>(2 + rng() % 6);
    const double q = 1.2 + 3.0 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const Vector u = random_matrix(d, 1, rng);
    const Matrix m = random_matrix(d, d, rng);
    const Vector eta = random_matrix(d, 1, rng);
    auto f = [&](const Vector& e) { return lq_norm(u + m * e, q); };
    const Vector g = lq_residual_gradient(u, m, q, eta);
    const Vector fd = oracle::central_difference(f, eta, 1e-6);
    CAPTURE(q);
    CHECK((g - fd).norm() <= 1e-4 * std::max(1.0, fd.norm()));
  }
}

TEST_CASE("residual minimization") {
  std::mt19937_64 rng(7);
  SUBCASE("q=2 matches least squares") {
    const Vector u = random_matrix(6, 1, rng);
    const Matrix m = random_matrix(6, 3, rng);
    const auto r = minimize_lq_residual(u, m, 2.0);
    const Vector ls = m.colPivHouseholderQr().solve(-u);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx((u + m * ls).norm()).epsilon(1e-9));
  }
  SUBCASE("u in the column space gives zero") {
    const Matrix m = random_matrix(5, 2, rng);
    const Vector u = m * random_matrix(2, 1, rng);
    const auto r = minimize_lq_residual(u, m, 3.0);
    CHECK(r.converged);
    CHECK(r.value <= 1e-9 * u.norm());
  }
  SUBCASE("q=3 optimum beats random perturbations") {
    const Vector u = random_matrix(6, 1, rng);
    const Matrix m = random_matrix(6, 2, rng);
    const auto r = minimize_lq_residual(u, m, 3.0, 1e-9);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(lq_norm(u + m * r.eta, 3.0)).epsilon(1e-12));
    for (int k = 0; k < 20; ++k) {
      const Vector e = r.eta + 1e-3 * random_matrix(2, 1, rng);
      CHECK(lq_norm(u + m * e, 3.0) >= r.value - 1e-12);
    }
  }
  SUBCASE("argument checks") {
    const Vector u = Vector::Ones(2);
    CHECK_THROWS_AS(minimize_lq_residual(u, Matrix::Identity(2, 2), 1.0), UsageError);
    CHECK_THROWS_AS(minimize_lq_residual(u, Matrix::Identity(2, 2), kInf), UsageError);
    CHECK_THROWS_AS(minimize_lq_residual(u, Matrix::Identity(2, 2), 2.0, 0.0), UsageError);
  }
}

TEST_CASE("inf-form estimator") {
  std::mt19937_64 rng(8);
  const Matrix x = random_matrix(9, 4, rng);
  const auto general = rademacher_general(x, 1.0, 3.0, 40, 1);
  const auto same = rademacher_invariant_inf(x, Matrix::Identity(4, 4), 1.0, 3.0, 40, 1);
  for (std::size_t t = 0; t < 40; ++t) CHECK(same.per_draw[t] == doctest::Approx(general.per_draw[t]).epsilon(1e-14));
  CHECK(same.nonconverged.empty());

  const auto l2 = rademacher_invariant_l2(x, flip_matrix(4), 1.0, 40, 1);
  const auto inf2 = rademacher_invariant_inf(x, flip_matrix(4), 1.0, 2.0, 40, 1);
  for (std::size_t t = 0; t < 40; ++t) CHECK(inf2.per_draw[t] == doctest::Approx(l2.per_draw[t]).epsilon(1e-6));
  CHECK_THROWS_AS(rademacher_invariant_inf(x, flip_matrix(4), 1.0, 1.0, 4, 1), UsageError);
}

TEST_CASE("transformation matrices") {
  const Matrix f = flip_matrix(3);
  CHECK(f(0, 2) == 1.0);
  CHECK(f(1, 1) == 1.0);
  CHECK(f(0, 0) == 0.0);
  const Matrix s = cyclic_shift_matrix(3);
  Vector e0 = Vector::Zero(3);
  e0[0] = 1.0;
  CHECK((s * e0)[1] == 1.0);
  CHECK(max_abs(s * s * s - Matrix::Identity(3, 3)) == 0.0);
}

TEST_CASE("Gaussian linear-invariance report") {
  const auto r = example_d1_report(8, 30, 1.0, 1.0, 400, 3);
  auto se = [](const ComplexityEstimate& a, const ComplexityEstimate& b) {
    return std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
  };
  CHECK(r.flip_invariant.value <= r.general.value + 3.0 * se(r.flip_invariant, r.general));
  CHECK(r.translation_invariant.value <= r.flip_invariant.value + 3.0 * se(r.translation_invariant, r.flip_invariant));
  CHECK(r.general_reference == doctest::Approx(std::sqrt(8.0 / 30.0)));
  CHECK(r.flip_reference == doctest::Approx(2.0 / (2.0 * std::sqrt(30.0))));
  CHECK(r.translation_reference == doctest::Approx(1.0 / 30.0));
  const std::string text = format_report(r);
  CHECK(text.rfind("class,estimate,std_error,reference\n", 0) == 0);
  CHECK(text.find("translation-invariant,") != std::string::npos);
  CHECK_THROWS_AS(example_d1_report(1, 10, 1.0, 1.0, 10, 0), UsageError);

  const Matrix g1 = gaussian_sample_matrix(5, 3, 2.0, 9);
  CHECK(g1 == gaussian_sample_matrix(5, 3, 2.0, 9));
  CHECK(g1.topRows(2) == gaussian_sample_matrix(2, 3, 2.0, 9));
}

TEST_CASE("sample matrix flattens points into rows") {
  const Sample s = testutil::random_sample(3, make_shape(2, 2, 1), 1, 4);
  const Matrix m = sample_matrix(s);
  CHECK(m.rows() == 3);
  CHECK(m.cols() == 4);
  CHECK(m(2, 3) == static_cast<double>(s.point(2).values()[3]));
}
