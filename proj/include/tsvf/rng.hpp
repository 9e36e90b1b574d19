#pragma once

#include <cstdint>
#include <random>

// Deterministic, replayable randomness.  The draw engine is std::mt19937_64
// (its output sequence is fixed by the standard) read through an explicit
// 53-bit mapping to [0,1), so no library distribution internals can change the
// stream.  Per-trial seeds come from a splitmix64 mix of (base seed XOR trial
// index).

namespace tsvf {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline uint64_t derive_seed(uint64_t base, uint64_t index) { return splitmix64(base ^ index); }

class DrawSource {
public:
    explicit DrawSource(uint64_t seed) : seed_(seed), engine_(seed) {}

    uint64_t seed() const { return seed_; }
    // Number of draws consumed so far; logged with every sampled quantity.
    uint64_t stream_index() const { return count_; }

    double uniform01() {
        ++count_;
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

private:
    uint64_t seed_;
    std::mt19937_64 engine_;
    uint64_t count_ = 0;
};

}  // namespace tsvf
