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

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mka/numerics/tensor.hpp"

namespace mka::numerics {

struct SymmetricEigen {
  std::vector<double> values;  // descending
  Matrix vectors;              // column j pairs with values[j]
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Each eigenvector's
/// largest-magnitude entry is made positive so the basis is reproducible.
SymmetricEigen symmetric_eigen(const Matrix& a);

struct PcaModel {
  std::vector<double> mean;
  Matrix components;                     // k x d, orthonormal rows
  std::vector<double> explained_variance;  // k entries, descending
  double total_variance = 0.0;           // trace of the covariance

  std::size_t dim() const { return mean.size(); }
  std::size_t rank() const { return components.rows(); }

  std::vector<double> transform(std::span<const double> x) const;
  std::vector<double> inverse_transform(std::span<const double> y) const;
};

/// Fit the top-k principal directions of the mean-centered rows of `x`.
/// Covariance uses the population (1/n) normalization.
PcaModel pca_fit(const SampleMatrix& x, std::size_t k);

}  // namespace mka::numerics
