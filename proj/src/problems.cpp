#include "esr/problems.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <fmt/format.h>

#include "esr/linalg.hpp"

namespace esr {

namespace {

struct QuadraticData {
  Matrix a;
  Vector b;
};

}  // namespace

Objective make_quadratic(const QuadraticSpec& spec, std::string name) {
  const Index n = spec.a.rows();
  if (n == 0 || spec.a.cols() != n) throw std::invalid_argument("make_quadratic: A must be square and non-empty");
  if (spec.b.size() != n) throw std::invalid_argument("make_quadratic: b dimension mismatch");
  const double asym = (spec.a - spec.a.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, spec.a.cwiseAbs().maxCoeff()))
    throw std::invalid_argument(fmt::format("make_quadratic: A not symmetric (max asymmetry {})", asym));

  Vector eigs;
  if (spec.eigenvalues) {
    eigs = *spec.eigenvalues;
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(spec.a, Eigen::EigenvaluesOnly);
    eigs = solver.eigenvalues();
  }
  const double mu = eigs.minCoeff();
  const double lip = eigs.maxCoeff();
  if (!(mu > 0.0)) throw std::invalid_argument("make_quadratic: A must be positive definite");

  auto data = std::make_shared<const QuadraticData>(QuadraticData{spec.a, spec.b});
  Eigen::LLT<Matrix> chol(spec.a);
  if (chol.info() != Eigen::Success) throw std::invalid_argument("make_quadratic: Cholesky failed");
  Vector x_star = chol.solve(-spec.b);

  Objective obj(
      std::move(name), n,
      [data](const Vector& x) { return 0.5 * x.dot(data->a * x) + data->b.dot(x); },
      [data](const Vector& x) -> Vector { return data->a * x + data->b; }, lip);
  obj.with_hvp([data](const Vector&, const Vector& v) -> Vector { return data->a * v; });
  obj.with_strong_convexity(mu);
  const double phi_star = 0.5 * x_star.dot(spec.a * x_star) + spec.b.dot(x_star);
  obj.with_reference(phi_star, std::move(x_star));
  return obj;
}

Objective make_illposed_quadratic(double rho) {
  if (!(rho > 1.0) || !std::isfinite(rho))
    throw std::invalid_argument(fmt::format("make_illposed_quadratic: need rho > 1, got {}", rho));
  const Vector diag = Vector{{1.0, rho, rho * rho}};
  QuadraticSpec spec{diag.asDiagonal(), Vector::Zero(3), diag};
  return make_quadratic(spec, "illposed");
}

QuadraticSpec quadratic_from_spectrum(const Vector& eigenvalues, Vector b, Rng& rng) {
  const Index n = eigenvalues.size();
  if (n == 0) throw std::invalid_argument("quadratic_from_spectrum: empty spectrum");
  if (b.size() != n) throw std::invalid_argument("quadratic_from_spectrum: b dimension mismatch");
  const Matrix gauss = rng.normal_matrix(n, n);
  Eigen::HouseholderQR<Matrix> qr(gauss);
  Matrix q = qr.householderQ();
  const Matrix& r = qr.matrixQR();
  for (Index j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  Matrix a = q * eigenvalues.asDiagonal() * q.transpose();
  a = 0.5 * (a + a.transpose()).eval();
  return QuadraticSpec{std::move(a), std::move(b), eigenvalues};
}

QuadraticSpec random_quadratic_spec(Index n, double eig_low, double eig_high, Rng& rng) {
  if (n <= 0) throw std::invalid_argument("random_quadratic: n must be positive");
  if (!(eig_low >= 0.0) || !(eig_high > eig_low))
    throw std::invalid_argument("random_quadratic: need 0 <= eig_low < eig_high");
  Vector eigs(n);
  for (Index i = 0; i < n; ++i) eigs[i] = rng.uniform(eig_low, eig_high);
  // QR draws come before b so b is the last block of the stream
  Vector placeholder = Vector::Zero(n);
  QuadraticSpec spec = quadratic_from_spectrum(eigs, placeholder, rng);
  spec.b = rng.normal_vector(n);
  return spec;
}

Objective make_random_quadratic(Index n, double eig_low, double eig_high, Rng& rng) {
  return make_quadratic(random_quadratic_spec(n, eig_low, eig_high, rng), "random_quadratic");
}

// ---------------------------------------------------------------------------

LogSumExpSpec random_logsumexp_spec(Index n, Index m, double rho, Rng& rng) {
  if (n <= 0 || m <= 0) throw std::invalid_argument("logsumexp: n and m must be positive");
  LogSumExpSpec spec;
  spec.rows = rng.normal_matrix(m, n);
  spec.shifts = rng.normal_vector(m);
  spec.rho = rho;
  return spec;
}

Vector logsumexp_weights(const LogSumExpSpec& spec, const Vector& x) {
  Vector z = (spec.rows * x - spec.shifts) / spec.rho;
  const double zmax = z.maxCoeff();
  Vector s = (z.array() - zmax).exp().matrix();
  return s / s.sum();
}

Objective make_logsumexp(const LogSumExpSpec& spec_in) {
  if (!(spec_in.rho > 0.0)) throw std::invalid_argument("make_logsumexp: rho must be positive");
  if (spec_in.rows.rows() < 1) throw std::invalid_argument("make_logsumexp: need at least one row");
  if (spec_in.shifts.size() != spec_in.rows.rows())
    throw std::invalid_argument("make_logsumexp: shifts must have one entry per row");
  auto spec = std::make_shared<const LogSumExpSpec>(spec_in);
  const Index n = spec->rows.cols();

  const Matrix& a = spec->rows;
  const auto top = power_iteration([&a](const Vector& v) -> Vector { return a.transpose() * (a * v); }, n);
  const double lip = top.eigenvalue / spec->rho;

  Objective obj(
      "logsumexp", n,
      [spec](const Vector& x) {
        const Vector z = (spec->rows * x - spec->shifts) / spec->rho;
        const double zmax = z.maxCoeff();
        return spec->rho * (zmax + std::log((z.array() - zmax).exp().sum()));
      },
      [spec](const Vector& x) -> Vector { return spec->rows.transpose() * logsumexp_weights(*spec, x); },
      lip);
  obj.with_hvp([spec](const Vector& x, const Vector& v) -> Vector {
    const Vector s = logsumexp_weights(*spec, x);
    const Vector av = spec->rows * v;
    const Vector inner = s.cwiseProduct(av) - s * s.dot(av);
    return spec->rows.transpose() * inner / spec->rho;
  });
  return obj;
}

Objective make_logsumexp(Index n, Index m, double rho, Rng& rng) {
  if (!(rho > 0.0)) throw std::invalid_argument("make_logsumexp: rho must be positive");
  return make_logsumexp(random_logsumexp_spec(n, m, rho, rng));
}

}  // namespace esr
