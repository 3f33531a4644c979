#include "hyperlab/rng.hpp"

#include <cmath>
#include <cstdio>

namespace hyperlab::rng {

namespace {

constexpr std::uint64_t kM0 = 0xD2E7470EE14C6C93ull;
constexpr std::uint64_t kM1 = 0xCA5A826395121157ull;
constexpr std::uint64_t kW0 = 0x9E3779B97F4A7C15ull;  // golden ratio
constexpr std::uint64_t kW1 = 0xBB67AE8584CAA73Bull;  // sqrt(3) - 1

inline std::uint64_t mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t* hi) {
  unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  *hi = static_cast<std::uint64_t>(p >> 64);
  return static_cast<std::uint64_t>(p);
}

}  // namespace

std::array<std::uint64_t, 4> philox4x64(const std::array<std::uint64_t, 4>& ctr,
                                        const std::array<std::uint64_t, 2>& key) {
  std::array<std::uint64_t, 4> c = ctr;
  std::array<std::uint64_t, 2> k = key;
  for (int round = 0; round < 10; ++round) {
    std::uint64_t hi0, hi1;
    const std::uint64_t lo0 = mulhilo(kM0, c[0], &hi0);
    const std::uint64_t lo1 = mulhilo(kM1, c[2], &hi1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kW0;
    k[1] += kW1;
  }
  return c;
}

std::string Lane::to_string() const {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "lane(seed=%llu,module=%llu,case=%llu,replica=%llu)",
                static_cast<unsigned long long>(master_seed),
                static_cast<unsigned long long>(module),
                static_cast<unsigned long long>(case_id),
                static_cast<unsigned long long>(replica));
  return buf;
}

Stream::Stream(Lane lane) : lane_(lane) {
  // The lane tuple occupies the key and the top counter words; the low
  // counter word is the running block index of the stream.
  key_ = {lane.master_seed, lane.module};
  ctr_ = {0, lane.replica, lane.case_id, lane.module};
}

void Stream::refill() {
  buf_ = philox4x64(ctr_, key_);
  ++ctr_[0];
  buf_pos_ = 0;
}

std::uint64_t Stream::next_u64() {
  if (buf_pos_ >= 4) refill();
  return buf_[buf_pos_++];
}

double Stream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Stream::exponential(double rate) {
  // u in [0,1) so log1p(-u) is finite
  return -std::log1p(-uniform01()) / rate;
}

double Stream::normal() {
  if (have_cached_normal_) {
    have_cached_normal_ = false;
    return cached_normal_;
  }
  const double u1 = uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log1p(-u1));
  const double a = 6.283185307179586476925286766559 * u2;
  cached_normal_ = r * std::sin(a);
  have_cached_normal_ = true;
  return r * std::cos(a);
}

std::uint64_t Stream::uniform_below(std::uint64_t n) {
  // rejection-free modulo is fine here: n is tiny compared to 2^64 in all
  // uses (vertex counts, case shuffles), bias < n/2^64
  return next_u64() % n;
}

}  // namespace hyperlab::rng
