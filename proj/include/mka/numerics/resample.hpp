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

#include "mka/numerics/tensor.hpp"

namespace mka::numerics {

/// Corner-aligned bilinear resampling: output index i samples source
/// coordinate i * (in - 1) / (out - 1). A length-1 axis on either side maps to
/// source index 0.
DenseMap bilinear_resize(const DenseMap& m, std::size_t out_h, std::size_t out_w);

}  // namespace mka::numerics
