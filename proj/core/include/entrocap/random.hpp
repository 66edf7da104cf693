#pragma once

#include "entrocap/types.hpp"

#include <cstdint>

namespace entrocap {

// Counter-based deterministic generator: every draw is a pure function of
// (key, counter), so parallel consumers can derive independent streams from a
// single seed and results are reproducible element-wise across platforms.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  // Independent sub-stream; deterministic in (seed, stream, index).
  CounterRng derive(std::uint64_t index) const;

  std::uint64_t next_u64();
  double uniform();        // (0,1)
  double gaussian();       // standard normal, Box-Muller (explicit bit mapping)
  Complex gaussian_complex();  // std complex normal (unit variance per component)

  Vector haar_vector(long dim);          // normalized Haar-random state vector
  Matrix gaussian_matrix(long r, long c);
  Matrix haar_unitary(long dim);
  // Haar-style random isometry with rows >= cols (QR with phase fix).
  Matrix haar_isometry(long rows, long cols);

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace entrocap
