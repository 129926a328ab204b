#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace smpc {

/// Philox4x32-10 counter-based generator. A (key, counter) pair maps to four
/// independent uniform 32-bit words, so draws can be evaluated in any order
/// and from any thread without shared state.
namespace philox {

inline void round_once(std::array<uint32_t, 4>& ctr, std::array<uint32_t, 2>& key) {
  constexpr uint32_t kMul0 = 0xD2511F53u;
  constexpr uint32_t kMul1 = 0xCD9E8D57u;
  const uint64_t p0 = static_cast<uint64_t>(kMul0) * ctr[0];
  const uint64_t p1 = static_cast<uint64_t>(kMul1) * ctr[2];
  const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32);
  const uint32_t lo0 = static_cast<uint32_t>(p0);
  const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32);
  const uint32_t lo1 = static_cast<uint32_t>(p1);
  ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  key[0] += 0x9E3779B9u;
  key[1] += 0xBB67AE85u;
}

inline std::array<uint32_t, 4> block(std::array<uint32_t, 4> ctr, std::array<uint32_t, 2> key) {
  for (int i = 0; i < 10; ++i) round_once(ctr, key);
  return ctr;
}

}  // namespace philox

/// Stateless stream of standard normals keyed by a 64-bit seed. Each
/// (a, b, c) coordinate yields four i.i.d. N(0,1) values by pushing Philox
/// uniforms through a rational approximation of the normal inverse CDF
/// (accurate to ~1e-9 relative, transcendental-free off the tails).
class NormalStream {
 public:
  explicit NormalStream(uint64_t seed)
      : key_{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)} {}

  std::array<float, 4> quad(uint32_t a, uint32_t b, uint32_t c) const {
    const std::array<uint32_t, 4> words = philox::block({a, b, c, 0u}, key_);
    return {normal_icdf(to_open_unit(words[0])), normal_icdf(to_open_unit(words[1])),
            normal_icdf(to_open_unit(words[2])), normal_icdf(to_open_unit(words[3]))};
  }

 private:
  // Maps the top 23 bits into (0, 1), bounded away from both endpoints.
  static float to_open_unit(uint32_t x) {
    return static_cast<float>(x >> 9) * 0x1.0p-23f + 0x1.0p-24f;
  }

  static float normal_icdf(float p) {
    constexpr float kLow = 0.02425f;
    if (p >= kLow && p <= 1.0f - kLow) {
      const float q = p - 0.5f;
      const float r = q * q;
      return q *
             (((((-3.969683028665376e+01f * r + 2.209460984245205e+02f) * r -
                 2.759285104469687e+02f) *
                    r +
                1.383577518672690e+02f) *
                   r -
               3.066479806614716e+01f) *
                  r +
              2.506628277459239e+00f) /
             (((((-5.447609879822406e+01f * r + 1.615858368580409e+02f) * r -
                 1.556989798598866e+02f) *
                    r +
                6.680131188771972e+01f) *
                   r -
               1.328068155288572e+01f) *
                  r +
              1.0f);
    }
    const bool lower = p < kLow;
    const float q = std::sqrt(-2.0f * std::log(lower ? p : 1.0f - p));
    const float x = (((((-7.784894002430293e-03f * q - 3.223964580411365e-01f) * q -
                        2.400758277161838e+00f) *
                           q -
                       2.549732539343734e+00f) *
                          q +
                      4.374664141464968e+00f) *
                         q +
                     2.938163982698783e+00f) /
                    ((((7.784695709041462e-03f * q + 3.224671290700398e-01f) * q +
                       2.445134137142996e+00f) *
                          q +
                      3.754408661907416e+00f) *
                         q +
                     1.0f);
    return lower ? x : -x;
  }

  std::array<uint32_t, 2> key_;
};

}  // namespace smpc
