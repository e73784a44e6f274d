#ifndef CAUSALABS_RNG_HPP
#define CAUSALABS_RNG_HPP

#include <cmath>
#include <cstdint>

namespace causalabs {

/// Counter-based random stream: every stream is a pure function of
/// (seed, row, stream id), so row generation can be parallelized or
/// chunked without changing the output.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t row, std::uint64_t stream)
      : state_(key(seed, row, stream)) {}

  std::uint64_t next_u64() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform on the open interval (0, 1).
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; the second deviate is cached.
  double next_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  static std::uint64_t scramble(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t key(std::uint64_t seed, std::uint64_t row,
                           std::uint64_t stream) {
    std::uint64_t k = scramble(seed);
    k = scramble(k ^ (row * 0xd1342543de82ef95ULL));
    k = scramble(k ^ (stream * 0xda942042e4dd58b5ULL));
    return k;
  }

  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Stream ids used by the simulator and the fitter. Keeping them in one
/// place guarantees distinct streams never alias.
namespace stream_id {
inline constexpr std::uint64_t kScmCoefficients = 1;
inline constexpr std::uint64_t kRotation = 2;
inline constexpr std::uint64_t kNoise = 3;
inline constexpr std::uint64_t kInterventionChoice = 4;
inline constexpr std::uint64_t kInterventionNoise = 5;
inline constexpr std::uint64_t kFitInit = 6;
}  // namespace stream_id

}  // namespace causalabs

#endif  // CAUSALABS_RNG_HPP
