// rng.hpp: counter-based random streams (Philox4x64-10).
//
// Every stochastic component draws from its own lane, keyed by
// (master seed, module id, case id, replica id).  Lanes are independent
// by construction and do not depend on scheduling, so estimates merge
// to bit-identical results for any thread count.
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace hyperlab::rng {

// module ids used for lane derivation (logged in reports)
enum class Module : std::uint64_t {
  vrjp = 1,
  sigma_hn = 2,
  sigma_h22 = 3,
  dynkin = 4,
  merminwagner = 5,
  cli = 6,
  test = 99,
};

struct Lane {
  std::uint64_t master_seed = 0;
  std::uint64_t module = 0;
  std::uint64_t case_id = 0;
  std::uint64_t replica = 0;
  std::string to_string() const;
};

// Philox4x64-10 block function; ctr/key conventions follow the reference
// implementation (verified against frozen known-answer vectors).
std::array<std::uint64_t, 4> philox4x64(const std::array<std::uint64_t, 4>& ctr,
                                        const std::array<std::uint64_t, 2>& key);

class Stream {
 public:
  Stream() : Stream(Lane{}) {}
  explicit Stream(Lane lane);
  Stream(std::uint64_t master_seed, Module m, std::uint64_t case_id, std::uint64_t replica)
      : Stream(Lane{master_seed, static_cast<std::uint64_t>(m), case_id, replica}) {}

  const Lane& lane() const { return lane_; }

  std::uint64_t next_u64();
  double uniform01();                    // [0, 1)
  double exponential(double rate);       // inverse CDF
  double normal();                       // Box-Muller, pair cached
  // uniform integer in [0, n)
  std::uint64_t uniform_below(std::uint64_t n);

 private:
  void refill();
  Lane lane_;
  std::array<std::uint64_t, 2> key_;
  std::array<std::uint64_t, 4> ctr_;
  std::array<std::uint64_t, 4> buf_;
  int buf_pos_ = 4;
  double cached_normal_ = 0.0;
  bool have_cached_normal_ = false;
};

}  // namespace hyperlab::rng
