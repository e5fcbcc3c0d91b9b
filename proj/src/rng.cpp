#include "frc/rng.hpp"

#include <cmath>
#include <numbers>

namespace frc {

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

// Uniform in (0, 1], never zero.
inline double to_unit(std::uint32_t x) { return (static_cast<double>(x) + 1.0) * 0x1p-32; }

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 2> key, std::array<std::uint32_t, 4> ctr) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

NormalStream::NormalStream(std::uint64_t seed, std::uint32_t stream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, stream_(stream) {}

void NormalStream::refill() {
  const std::uint64_t block = index_ / 4;
  const auto w = philox4x32(key_, {static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
                                   stream_, 0u});
  for (int pair = 0; pair < 2; ++pair) {
    const double r = std::sqrt(-2.0 * std::log(to_unit(w[2 * pair])));
    const double phi = 2.0 * std::numbers::pi * to_unit(w[2 * pair + 1]);
    buffer_[2 * pair] = r * std::cos(phi);
    buffer_[2 * pair + 1] = r * std::sin(phi);
  }
}

double NormalStream::next() {
  if (index_ % 4 == 0) refill();
  return buffer_[index_++ % 4];
}

}  // namespace frc
