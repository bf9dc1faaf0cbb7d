#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace duallstm {

/// Mixes a salt into a master seed so each consumer gets an independent,
/// reproducible stream. FNV-1a over the salt, then splitmix64 finalization.
std::uint64_t derive_seed(std::uint64_t master, std::string_view salt);

/// Deterministic RNG. Wraps mt19937_64 but maps to doubles by hand: the
/// standard distributions are implementation-defined, which would make
/// checkpoints depend on the standard library build.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; caches the spare draw.
  double gaussian();

  /// Uniform index in [0, n). Modulo mapping; fine for shuffles.
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(next_u64() % n);
  }

  /// In-place Fisher-Yates. std::shuffle is implementation-defined.
  template <typename Vec>
  void shuffle(Vec& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[index(i)]);
    }
  }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace duallstm
