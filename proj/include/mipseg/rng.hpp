#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>

namespace mipseg {

/// Seedable random source used everywhere randomness is needed. The engine
/// is std::mt19937_64, whose output stream is fully specified by the C++
/// standard, so identical seeds give identical streams on any conforming
/// implementation. The value mappings on top of it are documented in the
/// README so they can be reproduced bit-exactly elsewhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  /// [0,1) with 53 random mantissa bits: (u >> 11) * 2^-53.
  double uniform01() {
    return double(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  /// [0,n), one draw, modulo mapping.
  std::uint64_t bounded(std::uint64_t n) {
    return next_u64() % n;
  }

  /// Standard normal via the Marsaglia polar method; the spare value is
  /// returned on the next call.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  /// Uniform direction on the unit sphere (normalized normal triple).
  std::array<double, 3> unit_vector() {
    while (true) {
      double a = normal(), b = normal(), c = normal();
      double n = std::sqrt(a * a + b * b + c * c);
      if (n > 1e-12) return {a / n, b / n, c / n};
    }
  }

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mipseg
