#pragma once

#include <cstdint>
#include <limits>

namespace loggas {

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) { return mix64(a ^ mix64(b)); }

// Counter-based stream: output i is mix64(key + i·φ). The key is a hash of
// whatever identifies the stream (seed, replica, step, ...), so draws do not
// depend on scheduling.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key) : key_(mix64(key)) {}
  CounterRng(std::uint64_t a, std::uint64_t b) : key_(hash_combine(a, b)) {}
  CounterRng(std::uint64_t a, std::uint64_t b, std::uint64_t c) : key_(hash_combine(hash_combine(a, b), c)) {}
  CounterRng(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d)
      : key_(hash_combine(hash_combine(hash_combine(a, b), c), d)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return mix64(key_ + 0x632be59bd9b4e019ULL * ++ctr_); }

  // in (0,1)
  double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }
  double normal();

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace loggas
