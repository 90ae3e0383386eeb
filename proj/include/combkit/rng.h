// combkit/rng.h
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef COMBKIT_RNG_H_
#define COMBKIT_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace combkit {

// 64-bit FNV-1a over arbitrary byte chunks. Used to derive independent
// per-(seed, stream, key) generator seeds that are stable across platforms.
class SeedHasher {
 public:
  SeedHasher &Add(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) Byte(static_cast<unsigned char>(v >> (8 * i)));
    return *this;
  }
  SeedHasher &Add(std::string_view s) {
    for (unsigned char c : s) Byte(c);
    Byte(0xff);  // terminator so ("ab","c") != ("a","bc")
    return *this;
  }
  std::uint64_t Digest() const { return state_; }

 private:
  void Byte(unsigned char c) {
    state_ ^= c;
    state_ *= 0x100000001b3ULL;
  }
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream,
                                std::string_view key) {
  return SeedHasher().Add(seed).Add(stream).Add(key).Digest();
}

// Deterministic random stream. std::mt19937_64 output is pinned by the
// standard; the uniform/bounded conversions below avoid the
// implementation-defined std::distribution classes so identical seeds give
// identical streams everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform double in [0, 1), 53 random bits.
  double Uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n), n > 0. Multiply-shift mapping.
  std::size_t Bounded(std::size_t n) {
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(gen_()) * n) >> 64);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace combkit

#endif  // COMBKIT_RNG_H_
