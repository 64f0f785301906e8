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

// Serial reference kernels against their OpenMP twins on pipeline-sized
// inputs.

#include <benchmark/benchmark.h>

#include <vector>

#include "mka/numerics/kernels.hpp"
#include "mka/numerics/rng.hpp"

using namespace mka;
using namespace mka::kernels;

namespace {

DenseMap random_map(std::size_t h, std::size_t w, std::size_t c) {
  numerics::Rng rng(1);
  DenseMap m(h, w, c);
  for (double& v : m.data) v = rng.normal();
  return m;
}

Matrix random_matrix(std::size_t r, std::size_t c) {
  numerics::Rng rng(2);
  Matrix m(r, c);
  for (double& v : m.data()) v = rng.normal();
  return m;
}

template <DenseMap (*Resize)(const DenseMap&, std::size_t, std::size_t)>
void BM_Resize(benchmark::State& state) {
  const DenseMap in = random_map(32, 32, 64);
  for (auto _ : state) benchmark::DoNotOptimize(Resize(in, 64, 64));
}

template <DenseMap (*Linear)(const DenseMap&, const Matrix&, std::span<const double>)>
void BM_PixelwiseLinear(benchmark::State& state) {
  const DenseMap in = random_map(64, 64, 64);
  const Matrix w = random_matrix(64, 64);
  const std::vector<double> b(64, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(Linear(in, w, b));
}

template <DenseMap (*Conv)(const DenseMap&, const Conv2dParams&)>
void BM_Conv3x3(benchmark::State& state) {
  const DenseMap in = random_map(32, 32, 16);
  Conv2dParams conv(16, 16, 3);
  numerics::Rng rng(3);
  for (double& v : conv.weights) v = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(Conv(in, conv));
}

template <Matrix (*Cov)(const Matrix&, std::span<const double>)>
void BM_Covariance(benchmark::State& state) {
  const Matrix x = random_matrix(4096, 64);
  const std::vector<double> mean(64, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(Cov(x, mean));
}

template <void (*Assign)(const Matrix&, const Matrix&, std::span<std::size_t>, std::span<double>)>
void BM_AssignNearest(benchmark::State& state) {
  const Matrix x = random_matrix(4096, 3);
  const Matrix centers = random_matrix(5, 3);
  std::vector<std::size_t> labels(4096);
  std::vector<double> dist(4096);
  for (auto _ : state) {
    Assign(x, centers, labels, dist);
    benchmark::DoNotOptimize(labels.data());
  }
}

template <DenseMap (*Gauss)(std::size_t, std::size_t, std::span<const GaussianPeak>, double)>
void BM_GaussianMap(benchmark::State& state) {
  const std::vector<GaussianPeak> peaks = {{100.0, 120.0}, {220.0, 300.0}, {400.0, 50.0}};
  for (auto _ : state) benchmark::DoNotOptimize(Gauss(448, 448, peaks, 10.0));
}

}  // namespace

BENCHMARK(BM_Resize<serial::bilinear_resize>)->Name("resize/serial");
BENCHMARK(BM_Resize<omp::bilinear_resize>)->Name("resize/omp");
BENCHMARK(BM_PixelwiseLinear<serial::pixelwise_linear>)->Name("pixelwise_linear/serial");
BENCHMARK(BM_PixelwiseLinear<omp::pixelwise_linear>)->Name("pixelwise_linear/omp");
BENCHMARK(BM_Conv3x3<serial::conv2d_same>)->Name("conv3x3/serial");
BENCHMARK(BM_Conv3x3<omp::conv2d_same>)->Name("conv3x3/omp");
BENCHMARK(BM_Covariance<serial::covariance>)->Name("covariance/serial");
BENCHMARK(BM_Covariance<omp::covariance>)->Name("covariance/omp");
BENCHMARK(BM_AssignNearest<serial::assign_nearest>)->Name("assign_nearest/serial");
BENCHMARK(BM_AssignNearest<omp::assign_nearest>)->Name("assign_nearest/omp");
BENCHMARK(BM_GaussianMap<serial::gaussian_max_map>)->Name("gaussian_map/serial");
BENCHMARK(BM_GaussianMap<omp::gaussian_max_map>)->Name("gaussian_map/omp");

BENCHMARK_MAIN();
