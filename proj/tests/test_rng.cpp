#include <doctest.h>

#include <cmath>
#include <set>

#include "hyperlab/rng.hpp"
#include "hyperlab/stats.hpp"

using namespace hyperlab;

TEST_SUITE_BEGIN("rng");

// frozen reference outputs for Philox4x64-10 (counter-wise, two blocks each)
TEST_CASE("philox known answers") {
  using A4 = std::array<std::uint64_t, 4>;
  using A2 = std::array<std::uint64_t, 2>;

  A4 out = rng::philox4x64(A4{0, 0, 0, 0}, A2{0, 0});
  CHECK(out[0] == 0x16554d9eca36314cull);
  CHECK(out[1] == 0xdb20fe9d672d0fdcull);
  CHECK(out[2] == 0xd7e772cee186176bull);
  CHECK(out[3] == 0x7e68b68aec7ba23bull);
  // next block: the first word only advances
  out = rng::philox4x64(A4{1, 0, 0, 0}, A2{0, 0});
  CHECK(out[0] == 0x02f4ba6408e4d89bull);
  CHECK(out[3] == 0x907d7a052fd5b4dcull);

  const std::uint64_t f = 0xffffffffffffffffull;
  out = rng::philox4x64(A4{f, f, f, f}, A2{f, f});
  CHECK(out[0] == 0x87b092c3013fe90bull);
  CHECK(out[1] == 0x438c3c67be8d0224ull);
  CHECK(out[2] == 0x9cc7d7c69cd777b6ull);
  CHECK(out[3] == 0xa09caebf594f0ba0ull);

  out = rng::philox4x64(A4{0x243f6a8885a308d3ull, 0x13198a2e03707344ull, 0xa4093822299f31d0ull,
                           0x082efa98ec4e6c89ull},
                        A2{0x452821e638d01377ull, 0xbe5466cf34e90c6cull});
  CHECK(out[0] == 0xa528f45403e61d95ull);
  CHECK(out[1] == 0x38c72dbd566e9788ull);
  CHECK(out[2] == 0xa5a1610e72fd18b5ull);
  CHECK(out[3] == 0x57bd43b5e52b7fe6ull);
}

TEST_CASE("streams replay and lanes are distinct") {
  rng::Stream a(7, rng::Module::test, 3, 0);
  rng::Stream b(7, rng::Module::test, 3, 0);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  rng::Stream c(7, rng::Module::test, 3, 1);
  rng::Stream d(7, rng::Module::vrjp, 3, 0);
  rng::Stream e(8, rng::Module::test, 3, 0);
  std::set<std::uint64_t> firsts{rng::Stream(7, rng::Module::test, 3, 0).next_u64(),
                                 c.next_u64(), d.next_u64(), e.next_u64()};
  CHECK(firsts.size() == 4);
}

TEST_CASE("uniform01 range and moments") {
  rng::Stream s(123, rng::Module::test, 1, 0);
  stats::RunningStat acc;
  for (int i = 0; i < 200000; ++i) {
    const double u = s.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    acc.push(u);
  }
  CHECK(std::abs(acc.mean - 0.5) < 4.0 * acc.stderr_mean());
  CHECK(acc.variance() == doctest::Approx(1.0 / 12.0).epsilon(0.02));
}

TEST_CASE("normal and exponential moments") {
  rng::Stream s(9, rng::Module::test, 2, 0);
  stats::RunningStat zn, ze;
  for (int i = 0; i < 200000; ++i) {
    zn.push(s.normal());
    ze.push(s.exponential(2.5));
  }
  CHECK(std::abs(zn.mean) < 4.0 * zn.stderr_mean());
  CHECK(zn.variance() == doctest::Approx(1.0).epsilon(0.02));
  CHECK(std::abs(ze.mean - 0.4) < 4.0 * ze.stderr_mean());
  CHECK(ze.variance() == doctest::Approx(0.16).epsilon(0.03));
}

TEST_SUITE_END();
