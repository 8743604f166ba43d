#include "cutofflab/rng.hpp"

#include <cmath>

namespace cutofflab {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulwide(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(prod >> 32);
  lo = static_cast<std::uint32_t>(prod);
}

}  // namespace

Philox4x32::counter_t Philox4x32::round10(key_t key, counter_t ctr) {
  for (int r = 0; r < 10; ++r) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulwide(kPhiloxM0, ctr[0], hi0, lo0);
    mulwide(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

void Philox4x32::refill() {
  block_ = round10(key_, counter_);
  // bump the low counter word; 2^32 blocks per (step, trajectory) cell
  ++counter_[0];
  pos_ = 0;
}

std::uint32_t Philox4x32::next_u32() {
  if (pos_ >= 4) refill();
  return block_[static_cast<std::size_t>(pos_++)];
}

std::uint64_t Philox4x32::next_u64() {
  const std::uint64_t lo = next_u32();
  const std::uint64_t hi = next_u32();
  return (hi << 32) | lo;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t derive_stream_key(std::uint64_t master_seed, std::uint64_t module_id,
                                std::uint64_t job_index) {
  std::uint64_t s = master_seed;
  const std::uint64_t a = splitmix64(s);
  s = a ^ (module_id * 0xA24BAED4963EE407ull);
  const std::uint64_t b = splitmix64(s);
  s = b ^ (job_index * 0x9FB21C651E98DF25ull);
  return splitmix64(s);
}

double RngStream::uniform_pos() {
  // 53-bit mantissa, shifted into (0,1]
  return (static_cast<double>(gen_.next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

double RngStream::uniform() {
  return static_cast<double>(gen_.next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = uniform_pos();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  spare_ = radius * std::sin(angle);
  have_spare_ = true;
  return radius * std::cos(angle);
}

double RngStream::exponential() { return -std::log(uniform_pos()); }

long long RngStream::poisson(double mean) {
  if (mean <= 0.0) return 0;
  long long total = 0;
  // additivity split keeps exp(-mean) away from underflow
  while (mean > 32.0) {
    const double half = mean * 0.5;
    long long sub = 0;
    const double limit = std::exp(-half);
    double prod = 1.0;
    do {
      ++sub;
      prod *= uniform_pos();
    } while (prod > limit);
    total += sub - 1;
    mean -= half;
  }
  const double limit = std::exp(-mean);
  double prod = 1.0;
  long long count = 0;
  do {
    ++count;
    prod *= uniform_pos();
  } while (prod > limit);
  return total + count - 1;
}

}  // namespace cutofflab
