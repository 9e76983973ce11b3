#include "scn/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <span>

#include "scn/error.hpp"
#include "scn/parallel.hpp"
#include "scn/rng.hpp"

namespace scn {
namespace {

constexpr std::uint64_t kSigmaDomain = 0x7369676d61ULL;
constexpr std::uint64_t kGaussDomain = 0x6761757373ULL;

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

ComplexityEstimate summarize(std::vector<double> per_draw) {
  ComplexityEstimate est;
  est.draws = per_draw.size();
  est.value = pairwise_sum(per_draw) / static_cast<double>(est.draws);
  if (est.draws > 1) {
    std::vector<double> sq(per_draw.size());
    for (std::size_t t = 0; t < per_draw.size(); ++t) sq[t] = (per_draw[t] - est.value) * (per_draw[t] - est.value);
    const double var = pairwise_sum(sq) / static_cast<double>(est.draws - 1);
    est.std_error = std::sqrt(var / static_cast<double>(est.draws));
  }
  est.per_draw = std::move(per_draw);
  return est;
}

void check_common(const Matrix& x, double w, std::size_t draws) {
  if (x.rows() == 0 || x.cols() == 0) throw UsageError("empty sample");
  if (!(w >= 0.0) || !std::isfinite(w)) throw UsageError("W must be finite and nonnegative");
  if (draws == 0) throw UsageError("draws must be at least 1");
}

void check_transform(const Matrix& x, const Matrix& a) {
  if (a.rows() != a.cols()) throw DataError("transformation matrix must be square");
  if (a.rows() != x.cols()) {
    throw DataError("dimension mismatch: transformation is " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()) + ", data has dimension " + std::to_string(x.cols()));
  }
}

// Objective h = sum |r_i|^q / q and its gradient in r.
double power_sum(const Vector& r, double q) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) s += std::pow(std::abs(r[i]), q);
  return s / q;
}

Vector power_grad(const Vector& r, double q) {
  Vector g(r.size());
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    const double a = std::abs(r[i]);
    g[i] = a == 0.0 ? 0.0 : std::copysign(std::pow(a, q - 1.0), r[i]);
  }
  return g;
}

}  // namespace

Matrix sample_matrix(const Sample& sample) {
  const auto n = static_cast<Eigen::Index>(sample.size());
  const auto d = static_cast<Eigen::Index>(sample.shape().elements());
  Matrix x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto v = sample.point(static_cast<std::size_t>(i)).values();
    for (Eigen::Index k = 0; k < d; ++k) x(i, k) = v[static_cast<std::size_t>(k)];
  }
  return x;
}

Matrix pseudo_inverse(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  const double largest = s.size() > 0 ? s[0] : 0.0;
  const double cutoff = static_cast<double>(std::max(m.rows(), m.cols())) *
                        std::numeric_limits<double>::epsilon() * largest;
  Vector inv = Vector::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > cutoff) inv[i] = 1.0 / s[i];
  return svd.matrixV().leftCols(s.size()) * inv.asDiagonal() * svd.matrixU().leftCols(s.size()).transpose();
}

Matrix invariance_projector(const Matrix& a) {
  if (a.rows() != a.cols()) throw DataError("transformation matrix must be square");
  if (!a.allFinite()) throw DataError("transformation matrix has non-finite entries");
  const auto d = a.rows();
  const Matrix id = Matrix::Identity(d, d);
  const Matrix m = a - id;
  return id - m * pseudo_inverse(m);
}

double lq_norm(const Vector& v, double q) {
  if (std::isinf(q)) return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
  if (!(q >= 1.0)) throw UsageError("q must be in [1, inf]");
  if (q == 1.0) return v.cwiseAbs().sum();
  if (q == 2.0) return v.norm();
  const double scale = v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += std::pow(std::abs(v[i]) / scale, q);
  return scale * std::pow(s, 1.0 / q);
}

Vector rademacher_sum(const Matrix& x, std::uint64_t seed, std::size_t draw) {
  Stream s({seed, kSigmaDomain, draw});
  Vector u = Vector::Zero(x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) u += s.sign() * x.row(i).transpose();
  return u;
}

ComplexityEstimate rademacher_general(const Matrix& x, double w, double q, std::size_t draws, std::uint64_t seed) {
  check_common(x, w, draws);
  if (!(q >= 1.0)) throw UsageError("q must be in [1, inf]");
  const double scale = w / static_cast<double>(x.rows());
  std::vector<double> per_draw(draws);
  parallel_for(0, draws, [&](std::size_t t) { per_draw[t] = scale * lq_norm(rademacher_sum(x, seed, t), q); });
  return summarize(std::move(per_draw));
}

ComplexityEstimate rademacher_invariant_l2(const Matrix& x, const Matrix& a, double w, std::size_t draws,
                                           std::uint64_t seed) {
  check_common(x, w, draws);
  check_transform(x, a);
  const Matrix p = invariance_projector(a);
  const double scale = w / static_cast<double>(x.rows());
  std::vector<double> per_draw(draws);
  parallel_for(0, draws, [&](std::size_t t) { per_draw[t] = scale * (p * rademacher_sum(x, seed, t)).norm(); });
  return summarize(std::move(per_draw));
}

Vector lq_residual_gradient(const Vector& u, const Matrix& m, double q, const Vector& eta) {
  const Vector r = u + m * eta;
  const double f = lq_norm(r, q);
  if (f == 0.0) return Vector::Zero(eta.size());
  return m.transpose() * power_grad(r / f, q);
}

ResidualMinimum minimize_lq_residual(const Vector& u, const Matrix& m, double q, double tol,
                                     std::size_t max_iterations) {
  if (!(q > 1.0) || std::isinf(q)) throw UsageError("descent minimization needs q in (1, inf)");
  if (!(tol > 0.0)) throw UsageError("tolerance must be positive");
  ResidualMinimum out;
  out.eta = Vector::Zero(m.cols());
  const double scale = lq_norm(u, q);
  if (scale == 0.0) {
    out.converged = true;
    return out;
  }
  // Work on the unit-norm problem; the minimizer scales linearly with u.
  const Vector v = u / scale;
  Vector eta = Vector::Zero(m.cols());
  Vector r = v;
  double h = power_sum(r, q);
  Vector grad = m.transpose() * power_grad(r, q);
  const double fro = m.squaredNorm();
  double step = fro > 0.0 ? 1.0 / fro : 1.0;
  // A residual this small relative to ||u|| is an exact cancellation.
  constexpr double kVanishing = 1e-13;
  // Nonmonotone Armijo test against the worst of the recent values; a monotone
  // test throttles Barzilai-Borwein steps on ill-conditioned problems.
  constexpr std::size_t kMemory = 10;
  std::deque<double> recent{h};
  Vector best_eta = eta, best_r = r;
  double best_h = h;

  for (out.iterations = 0; out.iterations < max_iterations; ++out.iterations) {
    const double f = std::pow(q * h, 1.0 / q);
    if (f <= kVanishing) {
      out.converged = true;
      break;
    }
    const double gnorm = grad.norm() / std::pow(f, q - 1.0);
    if (gnorm <= tol) {
      out.converged = true;
      break;
    }
    const double g2 = grad.squaredNorm();
    double t = step;
    Vector eta_next, r_next;
    double h_next = h;
    bool accepted = false;
    for (int halvings = 0; halvings < 80; ++halvings) {
      eta_next = eta - t * grad;
      r_next = v + m * eta_next;
      h_next = power_sum(r_next, q);
      if (h_next <= *std::max_element(recent.begin(), recent.end()) - 1e-4 * t * g2) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
    const Vector grad_next = m.transpose() * power_grad(r_next, q);
    const Vector s = eta_next - eta;
    const Vector y = grad_next - grad;
    const double sy = s.dot(y);
    step = sy > 0.0 ? s.squaredNorm() / sy : 2.0 * t;
    eta = std::move(eta_next);
    r = std::move(r_next);
    grad = grad_next;
    h = h_next;
    recent.push_back(h);
    if (recent.size() > kMemory) recent.pop_front();
    if (h < best_h) {
      best_h = h;
      best_eta = eta;
      best_r = r;
    }
  }
  out.value = scale * lq_norm(best_r, q);
  out.eta = scale * best_eta;
  // eta = 0 is feasible; never report more than its value because of rounding.
  if (!(out.value < scale)) {
    out.value = scale;
    out.eta.setZero();
  }
  return out;
}

ComplexityEstimate rademacher_invariant_inf(const Matrix& x, const Matrix& a, double w, double q,
                                            std::size_t draws, std::uint64_t seed, double tol) {
  check_common(x, w, draws);
  check_transform(x, a);
  if (!(q > 1.0) || std::isinf(q)) throw UsageError("the descent estimator needs q in (1, inf)");
  const Matrix m = a - Matrix::Identity(a.rows(), a.cols());
  const double scale = w / static_cast<double>(x.rows());
  std::vector<double> per_draw(draws);
  std::vector<char> ok(draws, 1);
  parallel_for(0, draws, [&](std::size_t t) {
    const ResidualMinimum r = minimize_lq_residual(rademacher_sum(x, seed, t), m, q, tol);
    per_draw[t] = scale * r.value;
    ok[t] = r.converged;
  });
  ComplexityEstimate est = summarize(std::move(per_draw));
  for (std::size_t t = 0; t < draws; ++t)
    if (!ok[t]) est.nonconverged.push_back(t);
  return est;
}

Matrix flip_matrix(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  Matrix a = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) a(i, n - 1 - i) = 1.0;
  return a;
}

Matrix cyclic_shift_matrix(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  Matrix a = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) a((i + 1) % n, i) = 1.0;
  return a;
}

Matrix gaussian_sample_matrix(std::size_t n, std::size_t d, double sigma, std::uint64_t seed) {
  Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i) {
    Stream s({seed, kGaussDomain, i});
    for (std::size_t k = 0; k < d; ++k) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = sigma * s.normal();
  }
  return x;
}

LinearInvarianceReport example_d1_report(std::size_t d, std::size_t n, double sigma, double w, std::size_t draws,
                                         std::uint64_t seed) {
  if (d < 2) throw UsageError("the linear invariance report needs d >= 2");
  if (n == 0) throw UsageError("n must be positive");
  if (!(sigma > 0.0)) throw UsageError("sigma must be positive");
  const Matrix x = gaussian_sample_matrix(n, d, sigma, seed);
  LinearInvarianceReport r;
  r.d = d;
  r.n = n;
  r.sigma = sigma;
  r.w = w;
  r.general = rademacher_general(x, w, 2.0, draws, seed);
  r.flip_invariant = rademacher_invariant_l2(x, flip_matrix(d), w, draws, seed);
  r.translation_invariant = rademacher_invariant_l2(x, cyclic_shift_matrix(d), w, draws, seed);
  const double dn = static_cast<double>(n);
  r.general_reference = std::sqrt(static_cast<double>(d)) * w * sigma / std::sqrt(dn);
  r.flip_reference = std::sqrt(std::ceil(static_cast<double>(d) / 2.0)) * w * sigma / (2.0 * std::sqrt(dn));
  r.translation_reference = w * sigma / dn;
  return r;
}

std::string format_report(const LinearInvarianceReport& r) {
  std::string out = "class,estimate,std_error,reference\n";
  char line[256];
  auto row = [&](const char* name, const ComplexityEstimate& e, double ref) {
    std::snprintf(line, sizeof line, "%s,%.9g,%.9g,%.9g\n", name, e.value, e.std_error, ref);
    out += line;
  };
  row("general", r.general, r.general_reference);
  row("flip-invariant", r.flip_invariant, r.flip_reference);
  row("translation-invariant", r.translation_invariant, r.translation_reference);
  return out;
}

}  // namespace scn
