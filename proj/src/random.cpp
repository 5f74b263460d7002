#include "dkh/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dkh {

namespace {

constexpr std::uint32_t kMulA = 0xD2511F53;
constexpr std::uint32_t kMulB = 0xCD9E8D57;
constexpr std::uint32_t kWeylA = 0x9E3779B9;
constexpr std::uint32_t kWeylB = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMulA, ctr[0], hi0, lo0);
    mulhilo(kMulB, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeylA;
    key[1] += kWeylB;
  }
  return ctr;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t member_seed(std::uint64_t seed, std::uint64_t member) {
  return splitmix64(seed ^ splitmix64(member + 0x51ED270B7A3Full));
}

double uniform_from_bits(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t x = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

Philox4x32::Counter KeyedRng::bits(Stream stream, std::uint64_t step, std::uint64_t index,
                                   std::uint32_t block) const {
  const auto high_step = static_cast<std::uint32_t>(step >> 32);
  if (high_step >= (1u << 16) || block >= 4096)
    throw std::out_of_range("KeyedRng: address out of range");
  const Philox4x32::Counter ctr{
      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
      static_cast<std::uint32_t>(step),
      (static_cast<std::uint32_t>(stream) << 28) | (block << 16) | high_step};
  const Philox4x32::Key key{static_cast<std::uint32_t>(seed_),
                            static_cast<std::uint32_t>(seed_ >> 32)};
  return Philox4x32::generate(ctr, key);
}

std::array<double, 2> KeyedRng::uniforms(Stream stream, std::uint64_t step, std::uint64_t index,
                                         std::uint32_t block) const {
  const auto r = bits(stream, step, index, block);
  return {uniform_from_bits(r[0], r[1]), uniform_from_bits(r[2], r[3])};
}

std::array<double, 2> KeyedRng::normals(Stream stream, std::uint64_t step, std::uint64_t index,
                                        std::uint32_t block) const {
  const auto u = uniforms(stream, step, index, block);
  // 1 - u lies in (0, 1], keeping the logarithm finite.
  const double radius = std::sqrt(-2.0 * std::log(1.0 - u[0]));
  const double angle = 2.0 * std::numbers::pi * u[1];
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

double KeyedRng::normal(Stream stream, std::uint64_t step, std::uint64_t index,
                        std::uint32_t block) const {
  const auto u = uniforms(stream, step, index, block);
  const double radius = std::sqrt(-2.0 * std::log(1.0 - u[0]));
  return radius * std::cos(2.0 * std::numbers::pi * u[1]);
}

double KeyedSequence::uniform() {
  if (cached_ == 0) {
    cache_ = rng_.uniforms(stream_, step_, index_, block_++);
    cached_ = 2;
  }
  return cache_[2 - cached_--];
}

}  // namespace dkh
