#include <algorithm>
#include <cmath>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

#include "esr/linalg.hpp"
#include "esr/problems.hpp"

namespace esr {

namespace {

// log(1 + e^s) without overflow
double softplus(double s) { return s > 0.0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s)); }

double sigmoid(double s) {
  if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

// log(1 + sum_k e^{eta_k}); single-score rows reduce to softplus exactly
double log1p_sum_exp(const Eigen::Ref<const Eigen::RowVectorXd>& eta) {
  if (eta.size() == 1) return softplus(eta[0]);
  const double top = std::max(0.0, eta.maxCoeff());
  return top + std::log(std::exp(-top) + (eta.array() - top).exp().sum());
}

struct KernelData {
  Matrix cols;  // K G' (n x m)
  Matrix gram;  // G K G' (m x m)
  double theta = 0.0;
  int q = 2;
  std::vector<int> category;  // 1..q, with q the reference category
};

void validate_sketch(const KernelProblemSpec& spec) {
  const Index n = spec.num_samples();
  if (n == 0 || spec.feature_dim() == 0) throw std::invalid_argument("kernel problem: empty sample matrix");
  if (static_cast<Index>(spec.labels.size()) != n)
    throw std::invalid_argument("kernel problem: one label per sample required");
  if (spec.sketch.empty()) throw std::invalid_argument("kernel problem: empty sketch");
  if (spec.sketch_rows() > n) throw std::invalid_argument("kernel problem: sketch larger than sample count");
  for (std::size_t i = 0; i < spec.sketch.size(); ++i) {
    if (spec.sketch[i] < 0 || spec.sketch[i] >= n) throw std::invalid_argument("kernel problem: sketch index out of range");
    if (i > 0 && spec.sketch[i] <= spec.sketch[i - 1])
      throw std::invalid_argument("kernel problem: sketch indices must be sorted and distinct");
  }
  if (!(spec.theta > 0.0)) throw std::invalid_argument("kernel problem: theta must be positive");
}

std::shared_ptr<KernelData> build_data(const KernelProblemSpec& spec, int q, std::vector<int> category) {
  auto data = std::make_shared<KernelData>();
  data->cols = sketched_kernel_columns(spec);
  const Index m = spec.sketch_rows();
  data->gram.resize(m, m);
  for (Index r = 0; r < m; ++r) data->gram.row(r) = data->cols.row(spec.sketch[static_cast<std::size_t>(r)]);
  data->theta = spec.theta;
  data->q = q;
  data->category = std::move(category);
  return data;
}

double lipschitz_bound(const KernelData& data, double loss_curvature) {
  const Matrix& c = data.cols;
  const Matrix& s = data.gram;
  const Index m = s.rows();
  const auto loss = power_iteration([&c](const Vector& v) -> Vector { return c.transpose() * (c * v); }, m);
  const auto reg = power_iteration([&s](const Vector& v) -> Vector { return s * v; }, m);
  return data.theta * reg.eigenvalue + loss_curvature * loss.eigenvalue;
}

}  // namespace

double rbf_kernel(const Eigen::Ref<const Vector>& a1, const Eigen::Ref<const Vector>& a2) {
  return std::exp(-0.5 * (a1 - a2).squaredNorm());
}

Matrix sketched_kernel_columns(const KernelProblemSpec& spec) {
  const Index n = spec.num_samples();
  const Index m = spec.sketch_rows();
  Matrix out(n, m);
  for (Index j = 0; j < m; ++j) {
    const Vector anchor = spec.samples.row(spec.sketch[static_cast<std::size_t>(j)]).transpose();
    for (Index i = 0; i < n; ++i) out(i, j) = rbf_kernel(spec.samples.row(i).transpose(), anchor);
  }
  return out;
}

KernelProblemSpec generate_kernel_data(Index n, Index d, int q, Index m, double theta, Rng& rng) {
  if (n <= 0 || d <= 0) throw std::invalid_argument("generate_kernel_data: n and d must be positive");
  if (q < 2) throw std::invalid_argument("generate_kernel_data: need q >= 2");
  if (m <= 0 || m > n) throw std::invalid_argument("generate_kernel_data: need 0 < m <= n");
  KernelProblemSpec spec;
  spec.samples = rng.normal_matrix(n, d);
  spec.labels.resize(static_cast<std::size_t>(n));
  spec.num_classes = q;
  spec.theta = theta;
  if (q == 2) {
    spec.kind = LabelKind::binary;
    const Vector teacher = rng.normal_vector(d);
    for (Index i = 0; i < n; ++i) {
      const double p = sigmoid(spec.samples.row(i).dot(teacher));
      spec.labels[static_cast<std::size_t>(i)] = rng.uniform() < p ? 1 : 0;
    }
  } else {
    spec.kind = LabelKind::categorical;
    const Matrix teachers = rng.normal_matrix(d, q - 1);
    for (Index i = 0; i < n; ++i) {
      const Eigen::RowVectorXd eta = spec.samples.row(i) * teachers;
      const double denom = std::exp(log1p_sum_exp(eta));
      const double u = rng.uniform();
      double cumulative = 0.0;
      int category = q;
      for (int j = 0; j < q - 1; ++j) {
        cumulative += std::exp(eta[j]) / denom;
        if (u < cumulative) {
          category = j + 1;
          break;
        }
      }
      spec.labels[static_cast<std::size_t>(i)] = category;
    }
  }
  spec.sketch = rng.sample_without_replacement(n, m);
  return spec;
}

Objective make_kernel_logistic(const KernelProblemSpec& spec) {
  validate_sketch(spec);
  if (spec.kind != LabelKind::binary) throw std::invalid_argument("make_kernel_logistic: labels must be binary");
  std::vector<int> category;
  category.reserve(spec.labels.size());
  for (int b : spec.labels) {
    if (b != 0 && b != 1) throw std::invalid_argument(fmt::format("make_kernel_logistic: non-binary label {}", b));
    category.push_back(b == 1 ? 1 : 2);
  }
  auto data = build_data(spec, 2, std::move(category));
  Vector labels(spec.num_samples());
  for (Index i = 0; i < labels.size(); ++i) labels[i] = spec.labels[static_cast<std::size_t>(i)];
  const double lip = lipschitz_bound(*data, 0.25);

  return Objective(
      "kernel_logistic", spec.sketch_rows(),
      [data, labels](const Vector& x) {
        const Vector s = data->cols * x;
        double loss = 0.0;
        for (Index i = 0; i < s.size(); ++i) loss += softplus(s[i]) - labels[i] * s[i];
        return loss + 0.5 * data->theta * x.dot(data->gram * x);
      },
      [data, labels](const Vector& x) -> Vector {
        const Vector s = data->cols * x;
        Vector residual(s.size());
        for (Index i = 0; i < s.size(); ++i) residual[i] = sigmoid(s[i]) - labels[i];
        return data->cols.transpose() * residual + data->theta * (data->gram * x);
      },
      lip);
}

namespace {

Matrix scores(const KernelData& data, const Vector& vec_x) {
  const Index m = data.gram.rows();
  const int k = data.q - 1;
  Matrix eta(data.cols.rows(), k);
  for (int j = 0; j < k; ++j) {
    const Vector xj = vec_x.segment(j * m, m);
    eta.col(j) = data.cols * xj;
  }
  return eta;
}

Matrix probabilities_from_scores(const Matrix& eta) {
  Matrix p(eta.rows(), eta.cols());
  for (Index i = 0; i < eta.rows(); ++i) {
    if (eta.cols() == 1) {
      p(i, 0) = sigmoid(eta(i, 0));
    } else {
      const double lse = log1p_sum_exp(eta.row(i));
      p.row(i) = (eta.row(i).array() - lse).exp();
    }
  }
  return p;
}

}  // namespace

Matrix multinomial_probabilities(const KernelProblemSpec& spec, int q, const Vector& vec_x) {
  validate_sketch(spec);
  auto data = build_data(spec, q, {});
  if (vec_x.size() != spec.sketch_rows() * (q - 1)) throw std::invalid_argument("multinomial_probabilities: dimension mismatch");
  return probabilities_from_scores(scores(*data, vec_x));
}

Objective make_kernel_multinomial(const KernelProblemSpec& spec, int q) {
  if (q < 2) throw std::invalid_argument(fmt::format("make_kernel_multinomial: need q >= 2, got {}", q));
  validate_sketch(spec);
  std::vector<int> category;
  category.reserve(spec.labels.size());
  if (spec.kind == LabelKind::binary) {
    if (q != 2) throw std::invalid_argument("make_kernel_multinomial: binary labels require q == 2");
    for (int b : spec.labels) {
      if (b != 0 && b != 1) throw std::invalid_argument(fmt::format("make_kernel_multinomial: non-binary label {}", b));
      category.push_back(b == 1 ? 1 : 2);
    }
  } else {
    for (int b : spec.labels) {
      if (b < 1 || b > q) throw std::invalid_argument(fmt::format("make_kernel_multinomial: label {} outside 1..{}", b, q));
      category.push_back(b);
    }
  }
  auto data = build_data(spec, q, std::move(category));
  // per-sample curvature of the reference-category softmax: 1/4 for one free score, 1/2 otherwise
  const double lip = lipschitz_bound(*data, q == 2 ? 0.25 : 0.5);
  const Index m = spec.sketch_rows();

  return Objective(
      q == 2 ? "kernel_multinomial_q2" : "kernel_multinomial", m * (q - 1),
      [data, m](const Vector& vec_x) {
        const Matrix eta = scores(*data, vec_x);
        double loss = 0.0;
        for (Index i = 0; i < eta.rows(); ++i) {
          const int c = data->category[static_cast<std::size_t>(i)];
          const double picked = c < data->q ? eta(i, c - 1) : 0.0;
          loss += log1p_sum_exp(eta.row(i)) - picked;
        }
        double reg = 0.0;
        for (int j = 0; j < data->q - 1; ++j) {
          const Vector xj = vec_x.segment(j * m, m);
          reg += xj.dot(data->gram * xj);
        }
        return loss + 0.5 * data->theta * reg;
      },
      [data, m](const Vector& vec_x) -> Vector {
        const Matrix eta = scores(*data, vec_x);
        Matrix residual = probabilities_from_scores(eta);
        for (Index i = 0; i < eta.rows(); ++i) {
          const int c = data->category[static_cast<std::size_t>(i)];
          if (c < data->q) residual(i, c - 1) -= 1.0;
        }
        Vector grad(vec_x.size());
        for (int j = 0; j < data->q - 1; ++j) {
          const Vector rj = residual.col(j);
          const Vector xj = vec_x.segment(j * m, m);
          grad.segment(j * m, m) = data->cols.transpose() * rj + data->theta * (data->gram * xj);
        }
        return grad;
      },
      lip);
}

void write_kernel_csv(const KernelProblemSpec& spec, std::ostream& out) {
  const Index d = spec.feature_dim();
  for (Index j = 0; j < d; ++j) out << 'f' << (j + 1) << ',';
  out << "label\n";
  for (Index i = 0; i < spec.num_samples(); ++i) {
    for (Index j = 0; j < d; ++j) out << fmt::format("{:.17g}", spec.samples(i, j)) << ',';
    out << spec.labels[static_cast<std::size_t>(i)] << '\n';
  }
}

KernelProblemSpec read_kernel_csv(std::istream& in, LabelKind kind, int q) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("read_kernel_csv: missing header");
  const auto columns = static_cast<Index>(std::count(line.begin(), line.end(), ',')) + 1;
  if (columns < 2) throw std::invalid_argument("read_kernel_csv: need at least one feature column");
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (static_cast<Index>(row.size()) != columns)
      throw std::invalid_argument(fmt::format("read_kernel_csv: expected {} columns, got {}", columns, row.size()));
    labels.push_back(static_cast<int>(row.back()));
    row.pop_back();
    rows.push_back(std::move(row));
  }
  KernelProblemSpec spec;
  spec.samples.resize(static_cast<Index>(rows.size()), columns - 1);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (Index j = 0; j < columns - 1; ++j) spec.samples(static_cast<Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
  spec.labels = std::move(labels);
  spec.kind = kind;
  spec.num_classes = q;
  return spec;
}

}  // namespace esr
