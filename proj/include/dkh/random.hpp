#pragma once

#include <array>
#include <cstdint>

namespace dkh {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Stateless:
/// the output is a pure function of (key, counter).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key);
};

/// Independent random streams. Each consumer draws from its own stream so
/// adding draws in one place never shifts another consumer's numbers.
enum class Stream : std::uint32_t {
  FaceNoise = 1,
  ParticleStep = 2,
  GhostFill = 3,
  RegridFill = 4,
  InitPlacement = 5,
};

std::uint64_t splitmix64(std::uint64_t x);

/// Seed of ensemble member `member` under master seed `seed`.
std::uint64_t member_seed(std::uint64_t seed, std::uint64_t member);

/// Keyed random source. A draw is addressed by (stream, step, index, block):
/// e.g. the displacement of particle `id` at step `n` is
/// draw(ParticleStep, n, id, 0), independent of evaluation order.
class KeyedRng {
public:
  explicit KeyedRng(std::uint64_t seed = 0) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  /// 128 random bits for the given address. Requires `block` < 4096 and
  /// `step` < 2^48.
  Philox4x32::Counter bits(Stream stream, std::uint64_t step, std::uint64_t index,
                           std::uint32_t block = 0) const;

  /// Two independent uniforms in [0,1).
  std::array<double, 2> uniforms(Stream stream, std::uint64_t step, std::uint64_t index,
                                 std::uint32_t block = 0) const;

  /// First of the pair `normals` returns, without computing the second.
  double normal(Stream stream, std::uint64_t step, std::uint64_t index, std::uint32_t block = 0) const;
  /// Two independent standard normals (Box-Muller).
  std::array<double, 2> normals(Stream stream, std::uint64_t step, std::uint64_t index,
                                std::uint32_t block = 0) const;

private:
  std::uint64_t seed_;
};

/// Sequential uniform/normal generator over a fixed address, for consumers
/// that need a variable number of draws (e.g. placing k particles in a cell).
class KeyedSequence {
public:
  KeyedSequence(const KeyedRng& rng, Stream stream, std::uint64_t step, std::uint64_t index)
      : rng_(rng), stream_(stream), step_(step), index_(index) {}

  double uniform();

private:
  const KeyedRng& rng_;
  Stream stream_;
  std::uint64_t step_;
  std::uint64_t index_;
  std::uint32_t block_ = 0;
  std::array<double, 2> cache_{};
  int cached_ = 0;
};

double uniform_from_bits(std::uint32_t hi, std::uint32_t lo);

}  // namespace dkh
