#include "scdnn/stream.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace scdnn {

namespace {

std::size_t word_count(std::size_t length) { return (length + 63) / 64; }

// Clears the unused bits of the last word so popcount stays exact.
void mask_tail(std::vector<std::uint64_t>& words, std::size_t length) {
    const std::size_t rem = length & 63;
    if (rem != 0 && !words.empty()) words.back() &= (~0ull) >> (64 - rem);
}

const char* coding_name(CodingFormat c) {
    return c == CodingFormat::Unipolar ? "unipolar" : "bipolar";
}

}  // namespace

StochasticStream::StochasticStream(std::vector<std::uint64_t> words, std::size_t length,
                                   CodingFormat coding)
    : words_(std::move(words)), length_(length), coding_(coding) {
    if (length_ == 0) throw std::invalid_argument("stream length must be >= 1");
    if (words_.size() != word_count(length_))
        throw std::invalid_argument("stream word storage does not match length");
    mask_tail(words_, length_);
}

StochasticStream StochasticStream::from_bits(std::string_view digits, CodingFormat coding) {
    if (digits.empty()) throw std::invalid_argument("stream length must be >= 1");
    std::vector<std::uint64_t> words(word_count(digits.size()), 0);
    for (std::size_t i = 0; i < digits.size(); ++i) {
        const char c = digits[i];
        if (c != '0' && c != '1') throw std::invalid_argument("stream digits must be 0 or 1");
        if (c == '1') words[i >> 6] |= 1ull << (i & 63);
    }
    return StochasticStream(std::move(words), digits.size(), coding);
}

std::size_t StochasticStream::popcount() const {
    std::size_t ones = 0;
    for (std::uint64_t w : words_) ones += static_cast<std::size_t>(std::popcount(w));
    return ones;
}

std::string StochasticStream::to_bit_string() const {
    std::string s(length_, '0');
    for (std::size_t i = 0; i < length_; ++i)
        if (bit(i)) s[i] = '1';
    return s;
}

SubGenerator::SubGenerator(const GeneratorSpec& spec, std::uint64_t stream_index)
    : method_(spec.method),
      counter_(mix64(spec.seed ^ mix64(stream_index + kGoldenGamma))),
      lfsr_(spec.method == GeneratorMethod::Lfsr ? spec.lfsr_width : 16,
            mix64(spec.seed ^ mix64(stream_index + kGoldenGamma))) {}

std::uint32_t SubGenerator::next_below(std::uint32_t n) {
    if (n <= 1) return 0;
    return method_ == GeneratorMethod::Bernoulli ? counter_.next_below(n) : lfsr_.next_below(n);
}

std::uint64_t SubGenerator::next_word() { return counter_.next(); }

std::uint32_t SubGenerator::next_lfsr_value() { return lfsr_.next(); }

StochasticStream generate_stream(double value, std::size_t length, CodingFormat coding,
                                 const GeneratorSpec& gen, std::uint64_t stream_index) {
    if (length == 0) throw std::invalid_argument("stream length must be >= 1");
    const double lo = coding == CodingFormat::Unipolar ? 0.0 : -1.0;
    if (!(value >= lo && value <= 1.0))
        throw std::domain_error("value " + std::to_string(value) + " outside " +
                                coding_name(coding) + " interval");

    const double p = coding == CodingFormat::Unipolar ? value : (value + 1.0) / 2.0;
    SubGenerator src(gen, stream_index);
    std::vector<std::uint64_t> words(word_count(length), 0);

    if (gen.method == GeneratorMethod::Bernoulli) {
        // bit = (r < T) with T = p * 2^64; the boundary cases are pinned
        // exactly so p = 0 and p = 1 produce constant streams.
        const bool always = p >= 1.0;
        std::uint64_t threshold = 0;
        if (!always) {
            const double t = p * 0x1.0p64;
            threshold = t >= 0x1.0p64 ? ~0ull : static_cast<std::uint64_t>(t);
        }
        for (std::size_t i = 0; i < length; ++i) {
            if (always || src.next_word() < threshold) words[i >> 6] |= 1ull << (i & 63);
        }
    } else {
        // Hardware-style SNG: compare the LFSR value against a w-bit
        // threshold. States are uniform over [1, 2^w - 1].
        const std::uint32_t max = src.lfsr_max();
        const std::uint32_t threshold =
            p >= 1.0 ? max : static_cast<std::uint32_t>(std::llround(p * static_cast<double>(max)));
        for (std::size_t i = 0; i < length; ++i) {
            // state >= 1 always, so threshold 0 never fires
            if (src.next_lfsr_value() <= threshold) words[i >> 6] |= 1ull << (i & 63);
        }
    }
    return StochasticStream(std::move(words), length, coding);
}

double decode(const StochasticStream& stream) {
    const double ones = static_cast<double>(stream.popcount());
    const double m = static_cast<double>(stream.length());
    return stream.coding() == CodingFormat::Unipolar ? ones / m : 2.0 * ones / m - 1.0;
}

StochasticStream xnor_multiply(const StochasticStream& a, const StochasticStream& b) {
    if (a.coding() != CodingFormat::Bipolar || b.coding() != CodingFormat::Bipolar)
        throw std::invalid_argument("xnor_multiply requires bipolar streams");
    if (a.length() != b.length())
        throw std::invalid_argument("xnor_multiply requires equal lengths, got " +
                                    std::to_string(a.length()) + " and " +
                                    std::to_string(b.length()));
    std::vector<std::uint64_t> words(a.words().size());
    for (std::size_t i = 0; i < words.size(); ++i) words[i] = ~(a.words()[i] ^ b.words()[i]);
    return StochasticStream(std::move(words), a.length(), CodingFormat::Bipolar);
}

StochasticStream mux_scaled_add(std::span<const StochasticStream> inputs,
                                const GeneratorSpec& gen, std::uint64_t stream_index) {
    if (inputs.empty()) throw std::invalid_argument("mux_scaled_add requires at least one input");
    const std::size_t m = inputs[0].length();
    const CodingFormat coding = inputs[0].coding();
    for (const auto& s : inputs) {
        if (s.length() != m || s.coding() != coding)
            throw std::invalid_argument("mux_scaled_add inputs must share length and coding");
    }
    const auto n = static_cast<std::uint32_t>(inputs.size());
    SubGenerator select(gen, substream_id({stream_index, 0x6D7578ull}));  // select line
    std::vector<std::uint64_t> words(word_count(m), 0);
    for (std::size_t i = 0; i < m; ++i) {
        const std::uint32_t k = select.next_below(n);
        if (inputs[k].bit(i)) words[i >> 6] |= 1ull << (i & 63);
    }
    return StochasticStream(std::move(words), m, coding);
}

}  // namespace scdnn
