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

namespace mka::numerics {

/// Row-major H x W x C grid of feature vectors.
struct DenseMap {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  std::vector<double> data;

  DenseMap() = default;
  DenseMap(std::size_t h, std::size_t w, std::size_t c, double fill = 0.0)
      : height(h), width(w), channels(c), data(h * w * c, fill) {}

  std::size_t pixel_count() const { return height * width; }
  std::size_t index(std::size_t row, std::size_t col, std::size_t ch = 0) const {
    return (row * width + col) * channels + ch;
  }
  double& at(std::size_t row, std::size_t col, std::size_t ch) { return data[index(row, col, ch)]; }
  double at(std::size_t row, std::size_t col, std::size_t ch) const { return data[index(row, col, ch)]; }

  std::span<double> pixel(std::size_t row, std::size_t col) {
    return {data.data() + index(row, col), channels};
  }
  std::span<const double> pixel(std::size_t row, std::size_t col) const {
    return {data.data() + index(row, col), channels};
  }
  std::span<const double> pixel(std::size_t flat) const {
    return {data.data() + flat * channels, channels};
  }

  bool same_shape(const DenseMap& other) const {
    return height == other.height && width == other.width && channels == other.channels;
  }
  bool all_finite() const;
};

/// Dense row-major matrix. Also used as the n x d sample matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  Matrix transpose() const;
  bool all_finite() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

using SampleMatrix = Matrix;

Matrix matmul(const Matrix& a, const Matrix& b);
/// y = A x
std::vector<double> matvec(const Matrix& a, std::span<const double> x);
/// y = A^T x
std::vector<double> matvec_transposed(const Matrix& a, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
double squared_distance(std::span<const double> a, std::span<const double> b);

}  // namespace mka::numerics
