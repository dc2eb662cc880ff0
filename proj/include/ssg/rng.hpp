#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace ssg {

/// Seeded PRNG used by every randomized component. The engine is
/// std::mt19937_64, whose output sequence is fixed by the C++ standard, and
/// bounded draws use plain rejection sampling rather than the library
/// distributions (whose algorithms are implementation-defined). Draw sequences
/// are therefore identical across compilers and platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). `bound` must be positive.
  std::uint64_t below(std::uint64_t bound);

  /// Uniform integer in [lo, hi].
  std::int64_t between(std::int64_t lo, std::int64_t hi);

  template <class T>
  const T& pick(const std::vector<T>& items)
  {
      return items[below(items.size())];
  }

  /// Fisher-Yates, drawing from the back.
  template <class T>
  void shuffle(std::vector<T>& items)
  {
      for (std::size_t i = items.size(); i > 1; --i) {
          std::swap(items[i - 1], items[below(i)]);
      }
  }

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 finalizer; used to derive independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t x);

/// Deterministic sub-seed for a labelled child stream of `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

}  // namespace ssg
