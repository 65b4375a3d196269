// Copyright 2026 The cfris Authors
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


#include <cmath>
#include <set>

#include "cfris/rng.hpp"
#include "doctest.h"

using cfris::Philox4x32;
using cfris::RandomStream;

TEST_SUITE("rng") {
  TEST_CASE("philox known answers") {
    CHECK(Philox4x32::generate({0, 0, 0, 0}, {0, 0}) ==
          Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(Philox4x32::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
          Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(Philox4x32::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
          Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
  }

  TEST_CASE("streams are reproducible and distinct") {
    RandomStream a(5, 1, 2), b(5, 1, 2), c(5, 1, 3), d(6, 1, 2);
    for (int i = 0; i < 100; ++i) {
      const auto x = a.next_u64();
      CHECK(x == b.next_u64());
      CHECK(x != c.next_u64());
      CHECK(x != d.next_u64());
    }
  }

  TEST_CASE("uniform and normal moments") {
    RandomStream r(11, 7);
    const int n = 200000;
    double su = 0, su2 = 0, sn = 0, sn2 = 0, sn4 = 0;
    for (int i = 0; i < n; ++i) {
      const double u = r.uniform();
      REQUIRE(u >= 0.0);
      REQUIRE(u < 1.0);
      su += u;
      su2 += u * u;
      const double z = r.normal();
      sn += z;
      sn2 += z * z;
      sn4 += z * z * z * z;
    }
    CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(su2 / n == doctest::Approx(1.0 / 3.0).epsilon(0.01));
    CHECK(std::abs(sn / n) < 0.01);
    CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.01));
    CHECK(sn4 / n == doctest::Approx(3.0).epsilon(0.03));
  }

  TEST_CASE("complex normal is circular with the requested variance") {
    RandomStream r(3, 3);
    const int n = 200000;
    double p = 0;
    std::complex<double> pseudo = 0;
    for (int i = 0; i < n; ++i) {
      const auto z = r.complex_normal(2.5);
      p += std::norm(z);
      pseudo += z * z;
    }
    CHECK(p / n == doctest::Approx(2.5).epsilon(0.01));
    CHECK(std::abs(pseudo / double(n)) < 0.03);
  }
}
