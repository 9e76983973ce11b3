#include "scn/bounds.hpp"

#include <cmath>
#include <limits>

#include "scn/error.hpp"

namespace scn {
namespace {

void check_nonnegative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw UsageError(std::string(name) + " must be finite and nonnegative");
}

double simpson(double fa, double fm, double fb, double a, double b) { return (b - a) / 6.0 * (fa + 4.0 * fm + fb); }

double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(fa, flm, fm, a, m);
  const double right = simpson(fm, frm, fb, m, b);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// int_{t0}^{1/2} sqrt(log(1/t)) dt. With t = exp(-s^2) this is
// int_{sqrt(ln 2)}^{sqrt(ln 1/t0)} 2 s^2 exp(-s^2) ds, smooth and rapidly decaying.
double log_root_integral(double t0) {
  const double lo = std::sqrt(std::log(2.0));
  // exp(-s^2) underflows long before s = 40.
  const double hi = t0 > 0.0 ? std::sqrt(std::log(1.0 / t0)) : 40.0;
  if (hi <= lo) return 0.0;
  auto g = [](double s) { return 2.0 * s * s * std::exp(-s * s); };
  return adaptive_simpson(g, lo, std::min(hi, 40.0), 1e-12);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol, int max_depth) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return simpson_step(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, max_depth);
}

double zero_resolution_bound(double b, double m, double n) {
  check_nonnegative(b, "B");
  check_nonnegative(m, "m");
  if (!(n >= 1.0)) throw UsageError("n must be at least 1");
  return 24.0 * b * std::sqrt(m) / std::sqrt(n);
}

double refined_dudley_bound(double b, double kappa, double epsilon, double m, double n, double alpha) {
  check_nonnegative(b, "B");
  check_nonnegative(kappa, "kappa");
  check_nonnegative(epsilon, "epsilon");
  check_nonnegative(m, "m");
  check_nonnegative(alpha, "alpha");
  if (!(n >= 1.0)) throw UsageError("n must be at least 1");
  if (m > n) throw UsageError("cover size m cannot exceed n");
  if (alpha > b) throw UsageError("alpha must not exceed B");
  const double lipschitz_term = 4.0 * kappa * epsilon * std::sqrt(1.0 - m / n);
  double entropy = 0.0;
  if (b > 0.0 && m > 0.0) {
    // tau = 2B t turns int_alpha^B sqrt(log(2B/tau)) dtau into 2B int_{alpha/2B}^{1/2} sqrt(log(1/t)) dt.
    entropy = 12.0 * std::sqrt(m / n) * 2.0 * b * log_root_integral(alpha / (2.0 * b));
  }
  return lipschitz_term + 4.0 * alpha + entropy;
}

AdversarialLoss adversarial_loss(const std::vector<std::vector<double>>& table) {
  if (table.empty()) throw DataError("loss table is empty");
  AdversarialLoss out;
  double total = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& row = table[i];
    if (row.empty()) throw DataError("loss table row " + std::to_string(i) + " is empty");
    if (row.size() != table.front().size()) throw DataError("loss table row " + std::to_string(i) + " has the wrong width");
    double worst = -std::numeric_limits<double>::infinity();
    for (double v : row) {
      if (!(v >= 0.0 && v <= 1.0)) throw DataError("loss table entry outside [0,1] in row " + std::to_string(i));
      worst = std::max(worst, v);
    }
    out.per_example.push_back(worst);
    total += worst;
  }
  out.mean = total / static_cast<double>(table.size());
  return out;
}

double model_selection_bound(double adversarial_mean, double rademacher, std::size_t k, std::size_t n,
                             double delta) {
  if (k < 1) throw UsageError("k must be at least 1");
  if (n < 1) throw UsageError("n must be at least 1");
  if (!(delta > 0.0 && delta < 1.0)) throw UsageError("delta must be in (0, 1)");
  const double dn = static_cast<double>(n);
  return adversarial_mean + 4.0 * rademacher + std::sqrt(std::log(static_cast<double>(k)) / dn) +
         3.0 * std::sqrt(std::log(4.0 / delta) / (2.0 * dn));
}

std::vector<TransformSpec> transform_powerset(const std::vector<TransformSpec>& base) {
  const std::size_t l = base.size();
  if (l > 16) throw UsageError("power set enumeration is limited to 16 base sets");
  std::vector<TransformSpec> out;
  out.reserve(std::size_t{1} << l);
  for (std::size_t mask = 0; mask < (std::size_t{1} << l); ++mask) {
    std::vector<TransformSpec> picked;
    for (std::size_t i = 0; i < l; ++i)
      if (mask & (std::size_t{1} << i)) picked.push_back(base[i]);
    if (picked.empty()) {
      out.emplace_back(transform::Identity{}, "base");
    } else if (picked.size() == 1) {
      out.push_back(std::move(picked.front()));
    } else {
      out.push_back(compose(std::move(picked)));
    }
  }
  return out;
}

std::size_t powerset_index(const std::vector<std::size_t>& selected, std::size_t l) {
  if (l > 16) throw UsageError("power set enumeration is limited to 16 base sets");
  std::size_t mask = 0;
  for (std::size_t s : selected) {
    if (s < 1 || s > l) throw UsageError("set index " + std::to_string(s) + " outside [1, L]");
    mask |= std::size_t{1} << (s - 1);
  }
  return mask;
}

}  // namespace scn
