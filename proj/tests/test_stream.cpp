#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "scdnn/stream.hpp"

using namespace scdnn;

namespace {

const GeneratorSpec kGen{GeneratorMethod::Bernoulli, 42, 16};

StochasticStream bipolar(const char* bits) {
    return StochasticStream::from_bits(bits, CodingFormat::Bipolar);
}

}  // namespace

TEST_CASE("decode basic examples") {
    CHECK(decode(bipolar("1100")) == doctest::Approx(0.0));
    CHECK(decode(StochasticStream::from_bits("0010", CodingFormat::Unipolar)) ==
          doctest::Approx(0.25));
    CHECK(decode(bipolar("1111")) == doctest::Approx(1.0));
    CHECK(decode(bipolar("0000")) == doctest::Approx(-1.0));
}

TEST_CASE("generate boundary values are exact") {
    for (std::size_t m : {1, 5, 64, 257}) {
        auto ones = generate_stream(1.0, m, CodingFormat::Bipolar, kGen, 1);
        CHECK(ones.popcount() == m);
        CHECK(decode(ones) == 1.0);
        auto zeros = generate_stream(-1.0, m, CodingFormat::Bipolar, kGen, 2);
        CHECK(zeros.popcount() == 0);
        CHECK(decode(zeros) == -1.0);
        auto uni = generate_stream(0.0, m, CodingFormat::Unipolar, kGen, 3);
        CHECK(uni.popcount() == 0);
    }
}

TEST_CASE("generate zero value lands near zero at m=4096") {
    auto s = generate_stream(0.0, 4096, CodingFormat::Bipolar, kGen, 0);
    CHECK(std::abs(decode(s)) <= 0.05);  // binomial sigma = 2*sqrt(0.25/4096) ~ 0.016
}

TEST_CASE("generate is deterministic per (spec, stream index)") {
    auto a = generate_stream(0.3, 512, CodingFormat::Bipolar, kGen, 7);
    auto b = generate_stream(0.3, 512, CodingFormat::Bipolar, kGen, 7);
    CHECK(a == b);
    auto c = generate_stream(0.3, 512, CodingFormat::Bipolar, kGen, 8);
    CHECK(a != c);
    GeneratorSpec other = kGen;
    other.seed = 43;
    CHECK(a != generate_stream(0.3, 512, CodingFormat::Bipolar, other, 7));
}

TEST_CASE("generate rejects out-of-interval values and zero length") {
    CHECK_THROWS_AS(generate_stream(-0.1, 8, CodingFormat::Unipolar, kGen),
                    std::domain_error);
    CHECK_THROWS_AS(generate_stream(1.5, 8, CodingFormat::Bipolar, kGen), std::domain_error);
    CHECK_THROWS_AS(generate_stream(-1.5, 8, CodingFormat::Bipolar, kGen), std::domain_error);
    CHECK_THROWS_AS(generate_stream(0.5, 0, CodingFormat::Bipolar, kGen), std::invalid_argument);
}

TEST_CASE("lfsr generator is maximal length and usable for encoding") {
    Lfsr small(4, 99);
    std::set<std::uint32_t> seen;
    for (int i = 0; i < 15; ++i) seen.insert(small.next());
    CHECK(seen.size() == 15);  // visits every nonzero 4-bit value
    CHECK(*seen.begin() == 1);
    CHECK(*seen.rbegin() == 15);

    GeneratorSpec lf{GeneratorMethod::Lfsr, 42, 16};
    auto s = generate_stream(0.5, 4096, CodingFormat::Bipolar, lf, 0);
    CHECK(std::abs(decode(s)) <= 0.05);
    CHECK(s == generate_stream(0.5, 4096, CodingFormat::Bipolar, lf, 0));
    auto ones = generate_stream(1.0, 64, CodingFormat::Bipolar, lf, 0);
    CHECK(ones.popcount() == 64);

    GeneratorSpec bad{GeneratorMethod::Lfsr, 42, 2};
    CHECK_THROWS_AS(generate_stream(0.5, 8, CodingFormat::Bipolar, bad, 0),
                    std::invalid_argument);
}

TEST_CASE("xnor against all-ones is the identity") {
    auto a = generate_stream(0.37, 512, CodingFormat::Bipolar, kGen, 11);
    auto ones = generate_stream(1.0, 512, CodingFormat::Bipolar, kGen, 12);
    CHECK(xnor_multiply(a, ones) == a);
}

TEST_CASE("xnor hand example") {
    auto out = xnor_multiply(bipolar("1100"), bipolar("1010"));
    CHECK(out.to_bit_string() == "1001");
    CHECK(decode(out) == doctest::Approx(0.0));
}

TEST_CASE("xnor argument errors") {
    CHECK_THROWS_AS(xnor_multiply(bipolar("1100"), bipolar("11001")), std::invalid_argument);
    auto uni = StochasticStream::from_bits("1100", CodingFormat::Unipolar);
    CHECK_THROWS_AS(xnor_multiply(uni, uni), std::invalid_argument);
}

TEST_CASE("xnor matches the truth table on a fixed set of 8-bit pairs") {
    const std::vector<const char*> patterns = {"00000000", "11111111", "10101010", "01010101",
                                               "11001100", "00111100", "10000001", "01111110"};
    for (const char* pa : patterns) {
        for (const char* pb : patterns) {
            auto out = xnor_multiply(bipolar(pa), bipolar(pb));
            for (std::size_t i = 0; i < 8; ++i) {
                const bool expect = (pa[i] == '1') == (pb[i] == '1');
                CHECK(out.bit(i) == expect);
            }
        }
    }
}

TEST_CASE("xnor product expectation matches x*w") {
    const double x = 0.5, w = -0.5;
    const std::size_t m = 8192;
    const int reps = 100;
    std::vector<double> vals(reps);
    double mean = 0.0;
    for (int r = 0; r < reps; ++r) {
        auto a = generate_stream(x, m, CodingFormat::Bipolar, kGen, substream_id({1, (std::uint64_t)r}));
        auto b = generate_stream(w, m, CodingFormat::Bipolar, kGen, substream_id({2, (std::uint64_t)r}));
        vals[r] = decode(xnor_multiply(a, b));
        mean += vals[r];
    }
    mean /= reps;
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / reps);
    CHECK(std::abs(mean - x * w) <= 0.04);  // 3 sigma of one repetition
    CHECK(std::abs(mean - x * w) <= 3.0 * sd / std::sqrt(double(reps)));
}

TEST_CASE("mux over copies of one stream reproduces it exactly") {
    auto s = generate_stream(0.3, 1024, CodingFormat::Bipolar, kGen, 21);
    std::vector<StochasticStream> inputs{s, s, s};
    CHECK(mux_scaled_add(inputs, kGen, 5) == s);
}

TEST_CASE("mux means cancel for symmetric inputs") {
    const std::size_t m = 8192;
    std::vector<StochasticStream> two{generate_stream(1.0, m, CodingFormat::Bipolar, kGen, 31),
                                      generate_stream(-1.0, m, CodingFormat::Bipolar, kGen, 32)};
    CHECK(std::abs(decode(mux_scaled_add(two, kGen, 1))) <= 0.05);

    std::vector<StochasticStream> four;
    const double vals[] = {0.8, 0.4, -0.4, -0.8};
    for (std::size_t i = 0; i < 4; ++i)
        four.push_back(generate_stream(vals[i], m, CodingFormat::Bipolar, kGen, 40 + i));
    CHECK(std::abs(decode(mux_scaled_add(four, kGen, 2))) <= 0.05);
}

TEST_CASE("mux argument errors") {
    std::vector<StochasticStream> empty;
    CHECK_THROWS_AS(mux_scaled_add(empty, kGen), std::invalid_argument);
    std::vector<StochasticStream> mixed{bipolar("1100"), bipolar("110011")};
    CHECK_THROWS_AS(mux_scaled_add(mixed, kGen), std::invalid_argument);
    std::vector<StochasticStream> codings{bipolar("1100"),
                                          StochasticStream::from_bits("1100", CodingFormat::Unipolar)};
    CHECK_THROWS_AS(mux_scaled_add(codings, kGen), std::invalid_argument);
}

TEST_CASE("mux output stays inside the input range") {
    SplitMix64 rng(123);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + rng.next_below(5);
        std::vector<StochasticStream> inputs;
        double lo = 1.0, hi = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = 2.0 * rng.next_unit() - 1.0;
            inputs.push_back(generate_stream(v, 512, CodingFormat::Bipolar, kGen,
                                             substream_id({(std::uint64_t)trial, i})));
            lo = std::min(lo, decode(inputs.back()));
            hi = std::max(hi, decode(inputs.back()));
        }
        const double out = decode(mux_scaled_add(inputs, kGen, 900 + trial));
        CHECK(out >= lo - 1e-12);
        CHECK(out <= hi + 1e-12);
    }
}

TEST_CASE("generation is unbiased across repetitions") {
    const int reps = 100;
    for (std::size_t m : {256, 4096}) {
        for (double v : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
            double mean = 0.0;
            for (int r = 0; r < reps; ++r)
                mean += decode(generate_stream(v, m, CodingFormat::Bipolar, kGen,
                                               substream_id({9, (std::uint64_t)r, (std::uint64_t)m,
                                                             (std::uint64_t)(v * 4 + 8)})));
            mean /= reps;
            const double p = (v + 1.0) / 2.0;
            const double sigma = 2.0 * std::sqrt(p * (1.0 - p) / double(m));
            const double bound = 4.0 * sigma / std::sqrt(double(reps));
            CHECK(std::abs(mean - v) <= bound + 1e-15);
        }
    }
}
