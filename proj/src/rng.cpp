#include "mfvolterra/rng.hpp"

#include <cmath>
#include <numbers>

namespace mfv {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

// (0, 1], 53 bits.
inline double open_closed_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t x = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c,
                                        std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

NormalStream::NormalStream(std::uint64_t seed, NoiseDomain domain, std::uint32_t stream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      domain_(static_cast<std::uint32_t>(domain)),
      stream_(stream) {}

double NormalStream::operator()(std::uint64_t index) const {
  double pair[2];
  fill(index & ~std::uint64_t{1}, std::span<double>(pair, 2));
  return pair[index & 1];
}

void NormalStream::fill(std::uint64_t first, std::span<double> out) const {
  std::size_t k = 0;
  std::uint64_t index = first;
  while (k < out.size()) {
    const std::uint64_t block = index >> 1;
    const auto r = philox4x32({static_cast<std::uint32_t>(block),
                               static_cast<std::uint32_t>(block >> 32), stream_, domain_},
                              key_);
    const double u1 = open_closed_unit(r[0], r[1]);
    const double u2 = open_closed_unit(r[2], r[3]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    const double z[2] = {radius * std::cos(angle), radius * std::sin(angle)};
    for (std::uint64_t j = index & 1; j < 2 && k < out.size(); ++j, ++k, ++index) {
      out[k] = z[j];
    }
  }
}

}  // namespace mfv
