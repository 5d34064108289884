#ifndef TCL_RNG_H_
#define TCL_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <utility>

namespace tcl {

// SplitMix64 finalizer. Used to derive independent stream seeds.
uint64_t SplitMix64(uint64_t x);

// Derives a stream seed from a base seed and a list of keys, e.g.
// (run seed, "bu", sentence id, pass).
uint64_t DeriveSeed(uint64_t base, std::initializer_list<uint64_t> keys);

// Maps 64 random bits to a double in [0, 1).
inline double BitsToUnit(uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Seeded random stream. The standard distributions are implementation
// defined, so all conversions from raw engine output are done here.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }
  double Uniform() { return BitsToUnit(engine_()); }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  bool Bernoulli(double p) { return Uniform() < p; }

  // Uniform integer in [0, n) by rejection.
  uint64_t Below(uint64_t n);

  template <typename T>
  void Shuffle(std::span<T> items) {
    for (size_t i = items.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(Below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace tcl

#endif  // TCL_RNG_H_
