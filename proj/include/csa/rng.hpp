#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

#include <Eigen/Core>

namespace csa {

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t &state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

} // namespace detail

// Splittable random stream.
//
// Every stream is identified by a 64-bit key. The generator state is
// xoshiro256** seeded from the key through splitmix64. `split(i)` derives a
// child key from the parent key only (never from the consumed state), so a
// stream tree such as seed -> path -> iteration -> state is fully determined
// by its indices and independent of evaluation order.
class StreamRng {
public:
  using result_type = std::uint64_t;

  explicit StreamRng(std::uint64_t seed) noexcept : key_(mix_key(seed, 0x5EEDULL)) { reseed(); }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    const std::uint64_t result = detail::rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = detail::rotl(s_[3], 45);
    return result;
  }

  StreamRng split(std::uint64_t index) const noexcept {
    StreamRng child;
    child.key_ = mix_key(key_, index);
    child.reseed();
    return child;
  }

  std::uint64_t key() const noexcept { return key_; }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  double normal() {
    std::normal_distribution<double> dist;
    return dist(*this);
  }

  Eigen::VectorXd normal_vector(Eigen::Index d) {
    std::normal_distribution<double> dist;
    Eigen::VectorXd out(d);
    for (Eigen::Index i = 0; i < d; ++i)
      out[i] = dist(*this);
    return out;
  }

  double exponential() noexcept {
    // 1 - u lies in (0, 1].
    return -std::log1p(-uniform());
  }

private:
  StreamRng() noexcept = default;

  static std::uint64_t mix_key(std::uint64_t parent, std::uint64_t index) noexcept {
    std::uint64_t state = parent ^ (index * 0xD1B54A32D192ED03ULL);
    detail::splitmix64(state);
    return detail::splitmix64(state);
  }

  void reseed() noexcept {
    std::uint64_t state = key_;
    for (auto &word : s_)
      word = detail::splitmix64(state);
  }

  std::uint64_t key_ = 0;
  std::array<std::uint64_t, 4> s_{};
};

/// Inverse-CDF draw from a cumulative row whose last entry is 1 up to rounding.
template <typename Derived>
Eigen::Index sample_from_cumulative(const Eigen::DenseBase<Derived> &cumulative, double u) noexcept {
  const Eigen::Index n = cumulative.size();
  for (Eigen::Index i = 0; i + 1 < n; ++i)
    if (u < cumulative(i))
      return i;
  return n - 1;
}

} // namespace csa
