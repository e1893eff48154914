// Copyright 2026 The distillrec Authors
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

#include "distillrec/common.hpp"

namespace distillrec {

/// Dense embedding-shaped gradient accumulator. Loss functions add into it;
/// the caller zeroes it between optimization steps.
struct GradientBuffer {
  Mat user;
  Mat item;

  void resize(std::uint32_t num_users, std::uint32_t num_items,
              std::uint32_t dim) {
    user.resize(num_users, dim);
    item.resize(num_items, dim);
    set_zero();
  }

  void set_zero() {
    user.setZero();
    item.setZero();
  }
};

}  // namespace distillrec
