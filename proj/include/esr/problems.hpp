#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "esr/objective.hpp"
#include "esr/rng.hpp"

namespace esr {

// ---------------------------------------------------------------------------
// Quadratics: phi(x) = 1/2 x'Ax + b'x
// ---------------------------------------------------------------------------

struct QuadraticSpec {
  Matrix a;
  Vector b;
  /// Spectrum when known by construction; otherwise computed in make_quadratic.
  std::optional<Vector> eigenvalues;
};

/// Objective with analytic gradient/hvp, L = lambda_max, mu = lambda_min and the
/// closed-form minimizer x* solving A x* = -b (Cholesky).
Objective make_quadratic(const QuadraticSpec& spec, std::string name = "quadratic");

/// 1/2 (x1^2 + rho x2^2 + rho^2 x3^2); requires rho > 1.
Objective make_illposed_quadratic(double rho);

/// A = Q diag(eigs) Q' with Q from QR of a seeded Gaussian matrix (sign-fixed R).
QuadraticSpec quadratic_from_spectrum(const Vector& eigenvalues, Vector b, Rng& rng);

/// Eigenvalues uniform in (eig_low, eig_high), then Q, then b ~ N(0, I), drawn in
/// that order from rng.
QuadraticSpec random_quadratic_spec(Index n, double eig_low, double eig_high, Rng& rng);

Objective make_random_quadratic(Index n, double eig_low, double eig_high, Rng& rng);

// ---------------------------------------------------------------------------
// Log-sum-exp: phi(x) = rho log sum_i exp((a_i'x - b_i) / rho)
// ---------------------------------------------------------------------------

struct LogSumExpSpec {
  Matrix rows;   // m x n, row i is a_i'
  Vector shifts; // m
  double rho = 10.0;
};

/// Rows then shifts, standard Gaussian entries, drawn row by row.
LogSumExpSpec random_logsumexp_spec(Index n, Index m, double rho, Rng& rng);

/// L is the power-iteration upper bound on sigma_max(A)^2 / rho; mu is absent.
Objective make_logsumexp(const LogSumExpSpec& spec);
Objective make_logsumexp(Index n, Index m, double rho, Rng& rng);

/// Softmax weights s = softmax((A x - b) / rho) (exposed for tests).
Vector logsumexp_weights(const LogSumExpSpec& spec, const Vector& x);

// ---------------------------------------------------------------------------
// Kernel regularized learning with a Nystrom sketch
// ---------------------------------------------------------------------------

enum class LabelKind { binary, categorical };

struct KernelProblemSpec {
  Matrix samples;              // n x d, one sample per row
  std::vector<int> labels;     // {0,1} (binary) or {1..q} (categorical)
  LabelKind kind = LabelKind::binary;
  int num_classes = 2;         // q
  std::vector<Index> sketch;   // m distinct sample indices (rows of the identity)
  double theta = 1e-4;

  Index num_samples() const { return samples.rows(); }
  Index feature_dim() const { return samples.cols(); }
  Index sketch_rows() const { return static_cast<Index>(sketch.size()); }
};

/// RBF kernel exp(-1/2 ||a1 - a2||^2).
double rbf_kernel(const Eigen::Ref<const Vector>& a1, const Eigen::Ref<const Vector>& a2);

/// K G' (n x m): kernel between every sample and every sketched sample.
Matrix sketched_kernel_columns(const KernelProblemSpec& spec);

/// Gaussian-teacher data: features i.i.d. N(0,1); q == 2 gives binary labels
/// b_i ~ Bernoulli(sigmoid(w'a_i)), q >= 3 gives categorical labels drawn from
/// the reference-category softmax over q-1 teachers. The sketch samples m rows
/// uniformly without replacement.
KernelProblemSpec generate_kernel_data(Index n, Index d, int q, Index m, double theta, Rng& rng);

Objective make_kernel_logistic(const KernelProblemSpec& spec);

/// Dimension m*(q-1) over vec(X) (column-major). Binary specs are accepted when
/// q == 2: label 1 maps to category 1 and label 0 to the reference category.
Objective make_kernel_multinomial(const KernelProblemSpec& spec, int q);

/// Row probabilities p_ij for j < q (n x (q-1)) at coefficients vec(X).
Matrix multinomial_probabilities(const KernelProblemSpec& spec, int q, const Vector& vec_x);

/// CSV: header f1..fd,label; one sample per line. Sketch and theta are not stored.
void write_kernel_csv(const KernelProblemSpec& spec, std::ostream& out);
KernelProblemSpec read_kernel_csv(std::istream& in, LabelKind kind, int q);

}  // namespace esr
