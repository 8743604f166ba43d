#pragma once

#include <array>
#include <cstdint>

namespace cutofflab {

/// Philox 4x32-10 counter-based generator. A draw is a pure function of
/// (key, counter), so distinct trajectories and time steps can be assigned
/// disjoint counter blocks and sampled in any order, on any number of
/// workers, with identical results.
class Philox4x32 {
 public:
  using counter_t = std::array<std::uint32_t, 4>;
  using key_t = std::array<std::uint32_t, 2>;

  Philox4x32(key_t key, counter_t counter) : key_(key), counter_(counter) {}

  /// Next raw 32-bit word.
  std::uint32_t next_u32();
  std::uint64_t next_u64();

 private:
  static counter_t round10(key_t key, counter_t ctr);
  void refill();

  key_t key_;
  counter_t counter_;
  counter_t block_{};
  int pos_ = 4;  // empty buffer
};

/// SplitMix64 step; used only to derive well-mixed stream keys.
std::uint64_t splitmix64(std::uint64_t& state);

/// Derives the Philox key for a (master_seed, module, job) triple.
/// Documented splitting rule: two SplitMix64 steps over the xor-folded ids.
std::uint64_t derive_stream_key(std::uint64_t master_seed, std::uint64_t module_id,
                                std::uint64_t job_index);

/// One logical random stream: the (trajectory, step) pair picks a disjoint
/// 2^64-block counter range under a fixed run key. Draw methods consume
/// blocks sequentially inside that range.
class RngStream {
 public:
  RngStream(std::uint64_t run_key, std::uint64_t trajectory, std::uint64_t step)
      : gen_({static_cast<std::uint32_t>(run_key), static_cast<std::uint32_t>(run_key >> 32)},
             {0u, static_cast<std::uint32_t>(step),
              static_cast<std::uint32_t>(trajectory),
              static_cast<std::uint32_t>(trajectory >> 32)}) {}

  /// Uniform on (0,1].
  double uniform_pos();
  /// Uniform on [0,1).
  double uniform();
  /// Standard normal (Box-Muller; pairs are cached within the stream).
  double normal();
  /// Exponential with unit mean.
  double exponential();
  /// Poisson count; large means are split by additivity to keep the
  /// multiplication method in its stable range.
  long long poisson(double mean);
  std::uint64_t raw64() { return gen_.next_u64(); }

 private:
  Philox4x32 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace cutofflab
