#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <vector>

#include "scn/transforms.hpp"

namespace scn {

/// 24 B sqrt(m / n): complexity bound for a [-B, B]-valued invariant class
/// whose sample has an exact (epsilon = 0) cover of size m.
double zero_resolution_bound(double b, double m, double n);

/// Refined entropy-integral bound for kappa-Lipschitz invariant classes with
/// an epsilon-cover of size m, under the covering model N(tau) <= (2B/tau)^m
/// for tau < B:
///   4 kappa eps sqrt(1 - m/n) + 4 alpha + 12 int_alpha^B sqrt(m log(2B/tau) / n) dtau.
/// Throws UsageError when alpha > B, m > n or an input is negative.
double refined_dudley_bound(double b, double kappa, double epsilon, double m, double n, double alpha);

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth = 50);

/// Worst-case loss over each example's orbit.
struct AdversarialLoss {
  std::vector<double> per_example;  // row maxima
  double mean = 0.0;
};

/// Rows are examples, columns orbit members; entries must lie in [0, 1].
AdversarialLoss adversarial_loss(const std::vector<std::vector<double>>& table);

/// Model-selection bound over the k-th of several transformation sets:
///   mean + 4 rad + sqrt(log k / n) + 3 sqrt(log(4/delta) / (2n)).
double model_selection_bound(double adversarial_mean, double rademacher, std::size_t k, std::size_t n,
                             double delta);

/// All 2^L combinations of the base sets in binary order: entry `mask`
/// selects base set i when bit i is set. The empty selection is the identity
/// and a single selection is that set itself; larger ones are direct
/// products. In the model-selection bound entry `mask` is set number mask + 1.
std::vector<TransformSpec> transform_powerset(const std::vector<TransformSpec>& base);

/// Position in transform_powerset of the subset given by 1-based set indices.
std::size_t powerset_index(const std::vector<std::size_t>& selected, std::size_t l);

}  // namespace scn
