#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace mfv {

/// Philox4x32-10 counter-based generator (Salmon et al. 2011).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Stream tags keep the noise of different consumers disjoint.
enum class NoiseDomain : std::uint32_t { Cholesky = 1, Volterra = 2, Bridge = 3, Test = 99 };

/// Standard normals indexed by (seed, domain, stream, index). Pure function of its
/// arguments; two normals per Philox block via Box-Muller.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, NoiseDomain domain, std::uint32_t stream);

  double operator()(std::uint64_t index) const;

  /// out[k] = (*this)(first + k).
  void fill(std::uint64_t first, std::span<double> out) const;

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint32_t domain_;
  std::uint32_t stream_;
};

}  // namespace mfv
