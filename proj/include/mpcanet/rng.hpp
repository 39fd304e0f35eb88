#pragma once

// Seeded generators whose streams are fixed by this file, so splits and
// synthetic datasets reproduce bit for bit on any platform.
//
//   seeding:   splitmix64 (increment 0x9e3779b97f4a7c15, multipliers
//              0xbf58476d1ce4e5b9 and 0x94d049bb133111eb, shifts 30/27/31)
//              expanded into the four state words in order
//   generator: xoshiro256** (result = rotl(s1 * 5, 7) * 9; t = s1 << 17;
//              rotation 45), reference https://prng.di.unimi.it/
//   uniform:   (next() >> 11) * 2^-53, in [0, 1)
//   bounded:   rejection of next() values below 2^64 mod n, then value % n
//   normal:    Box-Muller on u1 = 1 - uniform(), u2 = uniform(); the cosine
//              branch is returned first, the sine branch on the next call

#include <cstddef>
#include <cstdint>

namespace mpcanet {

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

class Xoshiro256 {
public:
    explicit Xoshiro256(std::uint64_t seed);

    std::uint64_t next();
    double uniform();
    /// Uniform integer in [0, n); n must be positive.
    std::uint64_t below(std::uint64_t n);
    /// Standard normal deviate.
    double normal();

private:
    std::uint64_t s_[4];
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace mpcanet
