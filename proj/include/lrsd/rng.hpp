// Copyright 2026 The lrsd-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LRSD_RNG_HPP
#define LRSD_RNG_HPP

#include <cstdint>
#include <random>

namespace lrsd {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed for stream `index` of an ensemble; independent of scheduling order.
inline uint64_t derive_seed(uint64_t master, uint64_t index) {
    return splitmix64(splitmix64(master) ^ splitmix64(index + 0x5851F42D4C957F2DULL));
}

/// Thin wrapper around mt19937_64 with distribution code that does not depend
/// on the standard library vendor, so streams are bit-identical everywhere.
class Rng {
   public:
    explicit Rng(uint64_t seed) : engine_(seed) {
    }

    uint64_t next() {
        return engine_();
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) {
        return uniform() < p;
    }

    bool coin() {
        return (engine_() >> 63) != 0;
    }

    /// Uniform integer in [0, n) by rejection; n must be positive.
    uint64_t below(uint64_t n) {
        uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        while (true) {
            uint64_t v = engine_();
            if (v < limit) {
                return v % n;
            }
        }
    }

    /// Two distinct uniform indices in [0, n).
    std::pair<uint32_t, uint32_t> distinct_pair(uint32_t n) {
        uint32_t a = static_cast<uint32_t>(below(n));
        uint32_t b = static_cast<uint32_t>(below(n - 1));
        if (b >= a) {
            b++;
        }
        return {a, b};
    }

    std::mt19937_64 &engine() {
        return engine_;
    }

   private:
    std::mt19937_64 engine_;
};

}  // namespace lrsd

#endif
