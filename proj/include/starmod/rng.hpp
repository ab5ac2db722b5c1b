#pragma once

#include <complex>
#include <cstdint>
#include <string_view>

namespace starmod {

// Deterministic random stream (splitmix64 core, Box-Muller normals).
// Streams are derived from (seed, name) so that independent consumers never
// share state: adding a consumer cannot perturb another one's samples.
class RngStream {
public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  static RngStream named(std::uint64_t seed, std::string_view stream_name);

  std::uint64_t next_u64();

  // Uniform in [0, 1).
  double uniform();

  // Standard normal.
  double normal();

  // Standard complex normal: independent N(0,1) real and imaginary parts.
  std::complex<double> normal_complex() { return {normal(), normal()}; }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace starmod
