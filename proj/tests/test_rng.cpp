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

#include <doctest.h>

#include <set>

#include "distillrec/rng.hpp"

using namespace distillrec;

TEST_CASE("seeded streams replay identically") {
  auto a = make_rng(42, Stream::kBprSampling, 7, 3);
  auto b = make_rng(42, Stream::kBprSampling, 7, 3);
  for (int i = 0; i < 100; ++i) CHECK(a() == b());
}

TEST_CASE("distinct stream keys produce distinct sequences") {
  std::set<std::uint64_t> firsts;
  firsts.insert(make_rng(1, Stream::kBprSampling, 0, 0)());
  firsts.insert(make_rng(1, Stream::kBprSampling, 1, 0)());
  firsts.insert(make_rng(1, Stream::kBprSampling, 0, 1)());
  firsts.insert(make_rng(1, Stream::kDistillSampling, 0, 0)());
  firsts.insert(make_rng(2, Stream::kBprSampling, 0, 0)());
  CHECK(firsts.size() == 5);
}

TEST_CASE("mix_seed depends on every component") {
  const std::uint64_t base = mix_seed(9, 1, 2, 3);
  CHECK(base != mix_seed(10, 1, 2, 3));
  CHECK(base != mix_seed(9, 2, 2, 3));
  CHECK(base != mix_seed(9, 1, 3, 3));
  CHECK(base != mix_seed(9, 1, 2, 4));
}

TEST_CASE("splitmix64 scrambles zero") {
  CHECK(splitmix64(0) != 0);
  CHECK(splitmix64(1) != splitmix64(2));
}

TEST_CASE("uniform_unit stays in the half-open unit interval") {
  auto rng = make_rng(5, Stream::kSplit);
  for (int i = 0; i < 10000; ++i) {
    const double u = uniform_unit(rng);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("uniform_index covers the full range") {
  auto rng = make_rng(6, Stream::kSplit);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) seen.insert(uniform_index(rng, 7));
  CHECK(seen.size() == 7);
  CHECK(*seen.rbegin() == 6);
}
