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

#include "mka/numerics/resample.hpp"

#include "mka/error.hpp"
#include "mka/numerics/kernels.hpp"

namespace mka::numerics {

DenseMap bilinear_resize(const DenseMap& m, std::size_t out_h, std::size_t out_w) {
  if (out_h == 0 || out_w == 0) throw InvalidArgument("bilinear_resize: output shape must be positive");
  if (m.height == 0 || m.width == 0) throw InvalidArgument("bilinear_resize: empty input");
  if (m.height == out_h && m.width == out_w) return m;
  return kernels::omp::bilinear_resize(m, out_h, out_w);
}

}  // namespace mka::numerics
