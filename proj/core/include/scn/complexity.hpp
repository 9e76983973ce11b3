#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "scn/tensor.hpp"

namespace scn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Monte-Carlo estimate of an empirical Rademacher complexity.
struct ComplexityEstimate {
  double value = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(draws)
  std::size_t draws = 0;
  std::vector<double> per_draw;          // (W/n) * objective for each sigma draw
  std::vector<std::size_t> nonconverged;  // draws whose inner minimization hit the cap
};

/// Rows of the returned n x d matrix are the flattened sample points.
Matrix sample_matrix(const Sample& sample);

/// Moore-Penrose inverse via SVD; singular values at or below
/// max(rows, cols) * machine epsilon * largest singular value are dropped.
Matrix pseudo_inverse(const Matrix& m);

/// P = I - (A - I)(A - I)^+: the orthogonal projector onto the null space of
/// (A - I)^T, i.e. onto the weights w with A^T w = w. Throws DataError for a
/// non-square or non-finite A.
Matrix invariance_projector(const Matrix& a);

/// ||v||_q for q in [1, inf]; pass std::numeric_limits<double>::infinity() for the max norm.
double lq_norm(const Vector& v, double q);

/// u_sigma = sum_i sigma_i x_i for the sigma vector of `draw`. The same
/// (seed, draw) always gives the same signs, so estimators that share a seed
/// see identical draws.
Vector rademacher_sum(const Matrix& x, std::uint64_t seed, std::size_t draw);

/// (W/n) E ||u_sigma||_q: the complexity of the unconstrained norm-bounded linear class.
ComplexityEstimate rademacher_general(const Matrix& x, double w, double q, std::size_t draws, std::uint64_t seed);

/// (W/n) E ||P u_sigma||_2: the l2-bounded linear class restricted to A-invariant weights.
ComplexityEstimate rademacher_invariant_l2(const Matrix& x, const Matrix& a, double w, std::size_t draws,
                                           std::uint64_t seed);

inline constexpr double kDefaultDescentTolerance = 1e-10;
inline constexpr std::size_t kDefaultDescentIterations = 200000;

/// (W/n) E inf_eta ||u_sigma + (A - I) eta||_q for q in (1, inf), each
/// infimum found by first-order descent. Draws that do not reach the
/// gradient tolerance are listed in `nonconverged`.
ComplexityEstimate rademacher_invariant_inf(const Matrix& x, const Matrix& a, double w, double q,
                                            std::size_t draws, std::uint64_t seed,
                                            double tol = kDefaultDescentTolerance);

struct ResidualMinimum {
  double value = 0.0;  // min_eta ||u + M eta||_q
  Vector eta;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Gradient of eta -> ||u + M eta||_q (zero vector where the residual vanishes).
Vector lq_residual_gradient(const Vector& u, const Matrix& m, double q, const Vector& eta);

/// Minimizes ||u + M eta||_q by gradient descent on ||.||_q^q / q with
/// Barzilai-Borwein steps and Armijo backtracking. Stops once the gradient of
/// the norm, measured relative to ||u||_q, is at most tol.
ResidualMinimum minimize_lq_residual(const Vector& u, const Matrix& m, double q,
                                     double tol = kDefaultDescentTolerance,
                                     std::size_t max_iterations = kDefaultDescentIterations);

/// Coordinate reversal on R^d.
Matrix flip_matrix(std::size_t d);
/// Cyclic shift e_i -> e_{i+1 mod d}.
Matrix cyclic_shift_matrix(std::size_t d);

/// n x d matrix of independent N(0, sigma^2) entries; row i depends only on (seed, i).
Matrix gaussian_sample_matrix(std::size_t n, std::size_t d, double sigma, std::uint64_t seed);

/// Gaussian-data comparison of the general, flip-invariant and
/// circular-translation-invariant l2 linear classes.
struct LinearInvarianceReport {
  std::size_t d = 0, n = 0;
  double sigma = 0.0, w = 0.0;
  ComplexityEstimate general, flip_invariant, translation_invariant;
  // Reference rates: sqrt(d) W s / sqrt(n), sqrt(ceil(d/2)) W s / (2 sqrt(n)), W s / n.
  double general_reference = 0.0, flip_reference = 0.0, translation_reference = 0.0;
};

LinearInvarianceReport example_d1_report(std::size_t d, std::size_t n, double sigma, double w, std::size_t draws,
                                         std::uint64_t seed);

std::string format_report(const LinearInvarianceReport& r);

}  // namespace scn
