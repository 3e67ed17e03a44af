#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace matfactor {

/// Seeded random stream: std::mt19937_64 initialized by std::seed_seq from
/// the (seed, stream) words. Uniforms and normals use the standard
/// distributions, so streams are reproducible for a given standard library.
class Rng {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64/seed_seq";

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform() { return unit_(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() { return normal_(engine_); }

  /// Independent stream derived from this stream's seed words.
  Rng substream(std::uint64_t id) const;

 private:
  explicit Rng(std::vector<std::uint32_t> words);

  std::vector<std::uint32_t> words_;
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace matfactor
