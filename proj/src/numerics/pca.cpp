// Copyright 2026 The MKA Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mka/numerics/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mka/error.hpp"
#include "mka/numerics/kernels.hpp"

namespace mka::numerics {
namespace {

constexpr int kMaxSweeps = 100;

void rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
  const double apq = a(p, q);
  const double app = a(p, p);
  const double aqq = a(q, q);
  const double theta = (aqq - app) / (2.0 * apq);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const std::size_t n = a.rows();

  a(p, p) = app - t * apq;
  a(q, q) = aqq + t * apq;
  a(p, q) = a(q, p) = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k == p || k == q) continue;
    const double akp = a(k, p);
    const double akq = a(k, q);
    a(k, p) = a(p, k) = c * akp - s * akq;
    a(k, q) = a(q, k) = s * akp + c * akq;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

}  // namespace

SymmetricEigen symmetric_eigen(const Matrix& input) {
  if (input.rows() != input.cols()) throw InvalidArgument("symmetric_eigen: matrix is not square");
  const std::size_t n = input.rows();
  Matrix a = input;
  Matrix v = Matrix::identity(n);

  double scale = 0.0;
  for (double x : a.data()) scale += x * x;

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    }
    if (off == 0.0 || off <= 1e-32 * scale) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a(p, q) != 0.0) rotate(a, v, p, q);
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  SymmetricEigen out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = order[j];
    out.values[j] = a(src, src);
    std::size_t pivot = 0;
    for (std::size_t k = 1; k < n; ++k) {
      if (std::abs(v(k, src)) > std::abs(v(pivot, src))) pivot = k;
    }
    const double sign = v(pivot, src) < 0.0 ? -1.0 : 1.0;
    for (std::size_t k = 0; k < n; ++k) out.vectors(k, j) = sign * v(k, src);
  }
  return out;
}

std::vector<double> PcaModel::transform(std::span<const double> x) const {
  if (x.size() != dim()) throw InvalidArgument("pca transform: dimension mismatch");
  std::vector<double> centered(x.begin(), x.end());
  for (std::size_t i = 0; i < centered.size(); ++i) centered[i] -= mean[i];
  return matvec(components, centered);
}

std::vector<double> PcaModel::inverse_transform(std::span<const double> y) const {
  if (y.size() != rank()) throw InvalidArgument("pca inverse_transform: dimension mismatch");
  std::vector<double> x = matvec_transposed(components, y);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += mean[i];
  return x;
}

PcaModel pca_fit(const SampleMatrix& x, std::size_t k) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  if (n < 2) throw InvalidArgument("pca_fit: need at least two samples");
  if (k == 0 || k > std::min(n, d)) throw InvalidArgument("pca_fit: k must lie in [1, min(n, d)]");
  if (!x.all_finite()) throw InvalidArgument("pca_fit: non-finite sample");

  PcaModel model;
  model.mean.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) model.mean[j] += x(i, j);
  }
  for (double& m : model.mean) m /= static_cast<double>(n);

  const Matrix cov = kernels::omp::covariance(x, model.mean);
  const SymmetricEigen eig = symmetric_eigen(cov);

  model.components = Matrix(k, d);
  model.explained_variance.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    model.explained_variance[j] = std::max(0.0, eig.values[j]);
    for (std::size_t i = 0; i < d; ++i) model.components(j, i) = eig.vectors(i, j);
  }
  for (std::size_t i = 0; i < d; ++i) model.total_variance += cov(i, i);
  return model;
}

}  // namespace mka::numerics
