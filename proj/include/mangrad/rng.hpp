#pragma once

#include <array>
#include <cstdint>
#include <optional>

namespace mangrad {

/// Counter-based random stream (Philox4x32-10). A stream is addressed by
/// (seed, stream_id); identical addresses replay identical sequences, and
/// distinct stream ids never share a counter block. Satisfies
/// UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()();

  std::uint32_t next_u32();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1].
  double uniform_open();
  /// Standard normal, Box-Muller.
  double normal();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;
  static Block philox4x32_10(Block counter, Key key);

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_counter_ = 0;
  Block buffer_{};
  int buffer_pos_ = 4;
  std::optional<double> spare_normal_;
};

}  // namespace mangrad
