#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scdnn/rng.hpp"

namespace scdnn {

enum class CodingFormat { Unipolar, Bipolar };

enum class GeneratorMethod { Bernoulli, Lfsr };

// Keys the whole family of sub-generators used in one experiment.
// Identical spec + identical stream index reproduces a stream bit for bit.
struct GeneratorSpec {
    GeneratorMethod method = GeneratorMethod::Bernoulli;
    std::uint64_t seed = 0;
    unsigned lfsr_width = 16;  // only used by the Lfsr method
};

// A finite random bit sequence representing a real value as the
// probability of 1s. Packed into 64-bit words; immutable once built.
class StochasticStream {
  public:
    StochasticStream(std::vector<std::uint64_t> words, std::size_t length, CodingFormat coding);

    // Builds from a left-to-right digit string, e.g. "0010".
    static StochasticStream from_bits(std::string_view digits, CodingFormat coding);

    std::size_t length() const { return length_; }
    CodingFormat coding() const { return coding_; }
    std::span<const std::uint64_t> words() const { return words_; }

    bool bit(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
    std::size_t popcount() const;

    std::string to_bit_string() const;

    bool operator==(const StochasticStream& other) const = default;

  private:
    std::vector<std::uint64_t> words_;
    std::size_t length_;
    CodingFormat coding_;
};

// One derived bit source: (spec, stream index) -> independent sequence.
class SubGenerator {
  public:
    SubGenerator(const GeneratorSpec& spec, std::uint64_t stream_index);

    // Bit with probability `prob`; thresholds are fixed at construction
    // of the loop in generate_stream, so prob is re-derived per call here
    // only for the select-signal path.
    std::uint32_t next_below(std::uint32_t n);
    std::uint64_t next_word();        // Bernoulli path: full 64 random bits
    std::uint32_t next_lfsr_value();  // Lfsr path: w-bit state in [1, 2^w - 1]
    GeneratorMethod method() const { return method_; }
    std::uint32_t lfsr_max() const { return lfsr_.max_value(); }

  private:
    GeneratorMethod method_;
    SplitMix64 counter_;
    Lfsr lfsr_;
};

// Encodes `value` as a stream of `length` bits. Each bit is 1 with
// probability value (unipolar) or (value+1)/2 (bipolar).
StochasticStream generate_stream(double value, std::size_t length, CodingFormat coding,
                                 const GeneratorSpec& gen, std::uint64_t stream_index = 0);

// ones/m (unipolar) or 2*ones/m - 1 (bipolar).
double decode(const StochasticStream& stream);

// Bipolar multiplication: output bit i = XNOR(a_i, b_i).
StochasticStream xnor_multiply(const StochasticStream& a, const StochasticStream& b);

// Scaled addition: per cycle one input is selected uniformly at random
// and its bit copied; expected decoded output is the arithmetic mean.
StochasticStream mux_scaled_add(std::span<const StochasticStream> inputs,
                                const GeneratorSpec& gen, std::uint64_t stream_index = 0);

}  // namespace scdnn
