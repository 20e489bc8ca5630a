#pragma once

#include <cstdint>
#include <initializer_list>
#include <stdexcept>

namespace scdnn {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

// SplitMix64 finalizer; also used as a general 64-bit mixer.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Folds a tuple of 64-bit tags into one stream index. Used to key
// sub-generators so every operand (input, weight, select line) draws
// from its own statistically independent sequence.
inline constexpr std::uint64_t substream_id(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = 0x8E2A1CB3D4F5A6B7ull;
    for (std::uint64_t p : parts) h = mix64(h ^ (p + kGoldenGamma + (h << 6) + (h >> 2)));
    return h;
}

// Counter-based pseudo-random generator (SplitMix64). Each stream of
// draws is a pure function of its initial state, so (seed, stream index)
// fully determines the sequence.
class SplitMix64 {
  public:
    explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

    constexpr std::uint64_t next() {
        state_ += kGoldenGamma;
        return mix64(state_);
    }

    // Uniform draw in [0, n) by rejection on masked bits.
    std::uint32_t next_below(std::uint32_t n) {
        std::uint64_t mask = n - 1;
        mask |= mask >> 1;
        mask |= mask >> 2;
        mask |= mask >> 4;
        mask |= mask >> 8;
        mask |= mask >> 16;
        for (;;) {
            std::uint64_t r = next() & mask;
            if (r < n) return static_cast<std::uint32_t>(r);
        }
    }

    // Uniform real in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  private:
    std::uint64_t state_;
};

// Maximal-length Fibonacci LFSR, widths 3..32. State never reaches zero;
// the sequence visits every value in [1, 2^w - 1] once per period.
class Lfsr {
  public:
    Lfsr(unsigned width, std::uint64_t seed);

    unsigned width() const { return width_; }
    std::uint32_t max_value() const { return mask_; }

    std::uint32_t next() {
        std::uint32_t fb = parity(state_ & taps_);
        state_ = ((state_ >> 1) | (fb << (width_ - 1))) & mask_;
        return state_;
    }

    // Uniform draw in [0, n); shifts the never-zero state down by one.
    std::uint32_t next_below(std::uint32_t n) {
        std::uint32_t bits = n - 1;
        bits |= bits >> 1;
        bits |= bits >> 2;
        bits |= bits >> 4;
        bits |= bits >> 8;
        bits |= bits >> 16;
        for (;;) {
            std::uint32_t r = (next() - 1) & bits;
            if (r < n) return r;
        }
    }

  private:
    static std::uint32_t parity(std::uint32_t v) {
        v ^= v >> 16;
        v ^= v >> 8;
        v ^= v >> 4;
        v ^= v >> 2;
        v ^= v >> 1;
        return v & 1u;
    }

    unsigned width_;
    std::uint32_t mask_;
    std::uint32_t taps_;
    std::uint32_t state_;
};

}  // namespace scdnn
