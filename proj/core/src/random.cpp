#include "lncm/random.hpp"

#include <cmath>

#include "lncm/errors.hpp"

namespace lncm {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

// Ahrens-Dieter (1974) GS algorithm, 0 < shape < 1.
double gamma_small_shape(RandomStream& rng, double shape) {
  const double b = 1.0 + shape / M_E;
  for (;;) {
    const double p = b * rng.uniform();
    if (p <= 1.0) {
      const double x = std::pow(p, 1.0 / shape);
      if (rng.uniform() <= std::exp(-x)) return x;
    } else {
      const double x = -std::log((b - p) / shape);
      if (rng.uniform() <= std::pow(x, shape - 1.0)) return x;
    }
  }
}

// Marsaglia-Tsang (2000), shape >= 1, with the squeeze test before the log test.
double gamma_large_shape(RandomStream& rng, double shape) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = rng.std_normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(mix64(seed) ^ mix64(index + 0x632BE59BD9B4E019ull));
}

RandomStream::RandomStream(StreamKey key) : key_(key) {}

void RandomStream::refill() {
  const std::array<std::uint32_t, 4> counter = {
      static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
      static_cast<std::uint32_t>(key_.stream_index),
      static_cast<std::uint32_t>(key_.stream_index >> 32)};
  const std::array<std::uint32_t, 2> k = {static_cast<std::uint32_t>(key_.seed),
                                          static_cast<std::uint32_t>(key_.seed >> 32)};
  buffer_ = philox4x32_10(counter, k);
  ++block_;
  used_ = 0;
}

std::uint32_t RandomStream::next_u32() {
  if (used_ == 4) refill();
  return buffer_[used_++];
}

std::uint64_t RandomStream::next_u64() {
  const std::uint64_t hi = next_u32();
  return (hi << 32) | next_u32();
}

double RandomStream::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::std_normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  // Marsaglia polar method.
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * f;
  has_spare_ = true;
  return u * f;
}

double RandomStream::gamma(double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw InvalidInput("gamma shape must be positive and finite");
  }
  return shape < 1.0 ? gamma_small_shape(*this, shape) : gamma_large_shape(*this, shape);
}

double RandomStream::chi_square(std::uint64_t df) {
  if (df == 0) {
    throw InvalidInput("chi-square degrees of freedom must be at least 1");
  }
  double x = 0.0;
  do {
    x = 2.0 * gamma(0.5 * static_cast<double>(df));
  } while (!(x > 0.0));
  return x;
}

}  // namespace lncm
