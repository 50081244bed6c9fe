// Copyright 2026 The Franson Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FRANSON_CORE_RNG_H
#define FRANSON_CORE_RNG_H

#include <array>
#include <cmath>
#include <cstdint>

namespace franson {

// Philox 4x32-10 counter-based generator. A draw is a pure function of
// (key, counter), so independent substreams are addressed, not advanced:
// every pair of photons, every schedule slot and every restart of a search
// reads its own counter and the result cannot depend on thread layout.
struct Philox {
    static constexpr uint32_t W0 = 0x9E3779B9u;
    static constexpr uint32_t W1 = 0xBB67AE85u;
    static constexpr uint32_t M0 = 0xD2511F53u;
    static constexpr uint32_t M1 = 0xCD9E8D57u;

    static std::array<uint32_t, 4> block(uint64_t key, uint64_t hi, uint64_t lo) {
        uint32_t k0 = (uint32_t)key, k1 = (uint32_t)(key >> 32);
        uint32_t c0 = (uint32_t)lo, c1 = (uint32_t)(lo >> 32);
        uint32_t c2 = (uint32_t)hi, c3 = (uint32_t)(hi >> 32);
        for (int round = 0; round < 10; round++) {
            uint64_t p0 = (uint64_t)M0 * c0;
            uint64_t p1 = (uint64_t)M1 * c2;
            uint32_t h0 = (uint32_t)(p0 >> 32), l0 = (uint32_t)p0;
            uint32_t h1 = (uint32_t)(p1 >> 32), l1 = (uint32_t)p1;
            uint32_t n0 = h1 ^ c1 ^ k0;
            uint32_t n1 = l1;
            uint32_t n2 = h0 ^ c3 ^ k1;
            uint32_t n3 = l0;
            c0 = n0;
            c1 = n1;
            c2 = n2;
            c3 = n3;
            k0 += W0;
            k1 += W1;
        }
        return {c0, c1, c2, c3};
    }
};

// A stream of doubles/ints addressed by (seed, stream id, index). The index
// advances by one block per four 32-bit words consumed.
class CounterRng {
  public:
    CounterRng(uint64_t seed, uint64_t stream) : seed_(seed), stream_(stream) {
    }

    // Uniform double in [0, 1) with 53 random bits, one per call.
    double uniform() {
        uint64_t bits = next64();
        return (double)(bits >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n).
    uint64_t uniform_index(uint64_t n) {
        // Rejection-free modulo is fine here: n is tiny compared to 2^64,
        // the bias is ~n/2^64.
        return next64() % n;
    }

    // Exponential with the given mean, via inversion.
    double exponential(double mean) {
        double u = uniform();
        return -mean * std::log1p(-u);
    }

    uint64_t next64() {
        if (have_ >= 2) {
            have_ = 0;
            index_++;
        }
        auto b = Philox::block(seed_, stream_, index_);
        uint64_t w = have_ == 0 ? ((uint64_t)b[0] << 32 | b[1]) : ((uint64_t)b[2] << 32 | b[3]);
        have_++;
        return w;
    }

    // Jump directly to a block index (e.g. a per-item substream).
    void seek(uint64_t index) {
        index_ = index;
        have_ = 0;
    }

  private:
    uint64_t seed_;
    uint64_t stream_;
    uint64_t index_ = 0;
    int have_ = 0;
};

// One-shot addressed draws, for random access without carrying state.
inline double uniform_at(uint64_t seed, uint64_t stream, uint64_t index) {
    auto b = Philox::block(seed, stream, index);
    uint64_t bits = (uint64_t)b[0] << 32 | b[1];
    return (double)(bits >> 11) * 0x1.0p-53;
}

inline uint64_t index_at(uint64_t seed, uint64_t stream, uint64_t index, uint64_t n) {
    auto b = Philox::block(seed, stream, index);
    return ((uint64_t)b[0] << 32 | b[1]) % n;
}

}  // namespace franson

#endif
