// Counter-based Philox4x32-10 generator with per-stream Gaussian draws.
#pragma once

#include <array>
#include <cstdint>

namespace frc {

/// One Philox4x32-10 block: 4 random words for (key, counter).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 2> key, std::array<std::uint32_t, 4> counter);

/// Standard normals from stream `stream` of a seed. Draw i of the stream
/// depends only on (seed, stream, i), so streams can be consumed in any order
/// or in parallel.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint32_t stream);

  double next();
  std::uint64_t position() const noexcept { return index_; }

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint32_t stream_;
  std::uint64_t index_ = 0;
  std::array<double, 4> buffer_{};
};

}  // namespace frc
