#include <doctest.h>

#include <cmath>
#include <set>

#include "levymlmc/accumulator.hpp"
#include "levymlmc/random_stream.hpp"

using namespace levymlmc;

TEST_CASE("philox known answers") {
  auto c = philox4x32_10({0, 0, 0, 0}, {0, 0});
  CHECK(c == PhiloxCounter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  c = philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  CHECK(c == PhiloxCounter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  c = philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  CHECK(c == PhiloxCounter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams replay and separate") {
  RandomStream a(42, 3, 7);
  RandomStream b(42, 3, 7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  std::set<std::uint64_t> firsts;
  for (std::uint64_t s = 0; s < 4; ++s)
    for (std::uint64_t i = 0; i < 4; ++i) firsts.insert(RandomStream(1, s, i).next_u64());
  CHECK(firsts.size() == 16);
}

TEST_CASE("fork does not consume the parent") {
  RandomStream p(9, 1, 2);
  RandomStream q(9, 1, 2);
  auto child = p.fork(1);
  (void)child.next_u64();
  CHECK(p.next_u64() == q.next_u64());
  CHECK(p.fork(1).next_u64() != p.fork(2).next_u64());
}

TEST_CASE("uniform, normal and exponential moments") {
  RandomStream r(123);
  MomentAccumulator u, n, e;
  for (int i = 0; i < 200000; ++i) {
    const double x = r.uniform();
    REQUIRE(x > 0.0);
    REQUIRE(x < 1.0);
    u.add(x);
    n.add(r.normal());
    e.add(r.exponential(2.0));
  }
  CHECK(std::abs(u.mean() - 0.5) < 4 * u.stderr_mean());
  CHECK(std::abs(u.variance() - 1.0 / 12) < 4 * u.stderr_variance());
  CHECK(std::abs(n.mean()) < 4 * n.stderr_mean());
  CHECK(std::abs(n.variance() - 1.0) < 4 * n.stderr_variance());
  CHECK(std::abs(e.mean() - 0.5) < 4 * e.stderr_mean());
  CHECK(std::isinf(r.exponential(0.0)));
}
