#pragma once

#include <array>
#include <cstdint>

namespace lncm {

/// Identifies one independent random stream: the same key always yields the
/// same sequence, whichever thread consumes it.
struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t stream_index = 0;

  friend bool operator==(const StreamKey&, const StreamKey&) = default;
};

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// Counter-based generator over one StreamKey. The key selects the Philox key
/// (seed) and the upper half of the counter (stream index); the lower half
/// counts blocks, so streams never overlap for fewer than 2^64 blocks.
class RandomStream {
 public:
  explicit RandomStream(StreamKey key);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform on the open interval (0, 1) with 53-bit resolution.
  double uniform();

  double std_normal();

  /// Gamma(shape, scale 1). Throws InvalidInput unless shape > 0.
  double gamma(double shape);

  /// Chi-square with `df` degrees of freedom, drawn as 2 * Gamma(df / 2).
  /// Throws InvalidInput for df == 0.
  double chi_square(std::uint64_t df);

  const StreamKey& key() const { return key_; }

 private:
  void refill();

  StreamKey key_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  unsigned used_ = 4;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// SplitMix64 finalizer; used to derive child seeds from (seed, index) pairs.
std::uint64_t mix64(std::uint64_t x);

/// Seed for a derived family of streams, e.g. the inner Monte Carlo of one
/// simulation replicate.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace lncm
