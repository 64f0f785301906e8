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

#include <functional>
#include <span>
#include <vector>

namespace mka::numerics {

using ScalarFunction = std::function<double(std::span<const double>)>;

/// Central-difference gradient (f(x + eps e_i) - f(x - eps e_i)) / (2 eps).
/// Throws NumericError if f returns a non-finite value.
std::vector<double> finite_diff_gradient(const ScalarFunction& f, std::span<const double> x, double eps = 1e-5);

/// ||a - b|| / (||a|| + ||b||), or the absolute difference when both norms
/// fall below `floor`.
double relative_error(std::span<const double> a, std::span<const double> b, double floor = 1e-12);

}  // namespace mka::numerics
