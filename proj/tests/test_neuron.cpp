#include <doctest.h>

#include <cmath>
#include <vector>

#include "scdnn/neuron.hpp"

using namespace scdnn;

namespace {

const GeneratorSpec kGen{GeneratorMethod::Bernoulli, 1234, 16};

std::vector<StochasticStream> encode_all(std::span<const double> values, std::size_t m,
                                         std::uint64_t tag) {
    std::vector<StochasticStream> out;
    out.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        out.push_back(generate_stream(values[i], m, CodingFormat::Bipolar, kGen,
                                      substream_id({tag, i})));
    return out;
}

}  // namespace

TEST_CASE("apc_count is a population count") {
    const std::uint8_t bits[] = {1, 0, 1};
    CHECK(apc_count(bits) == 2);
    std::vector<std::uint8_t> zeros(9, 0);
    CHECK(apc_count(zeros) == 0);
    std::vector<std::uint8_t> ones(16, 1);
    CHECK(apc_count(ones) == 16);
}

TEST_CASE("apc_count_columns matches per-bit counting") {
    std::vector<double> vals{0.4, -0.2, 0.9, -0.8, 0.0};
    auto streams = encode_all(vals, 130, 77);
    auto counts = apc_count_columns(streams);
    REQUIRE(counts.size() == 130);
    for (std::size_t t = 0; t < 130; ++t) {
        unsigned expect = 0;
        for (const auto& s : streams) expect += s.bit(t) ? 1 : 0;
        CHECK(counts[t] == expect);
    }
}

TEST_CASE("btanh holds the centerline when counts sit at n/2") {
    std::vector<std::uint32_t> counts(64, 2);  // n = 4, step = 0 every cycle
    auto out = btanh_activate(counts, 4, 8);
    CHECK(out.length() == 64);
    CHECK(out.coding() == CodingFormat::Bipolar);
    CHECK(decode(out) == 1.0);  // state parked at S/2, output bit stays 1
}

TEST_CASE("btanh zero-sum inputs decode near zero over trials") {
    const std::size_t n = 4, m = 1024;
    double mean = 0.0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
        // Antisymmetric inputs against unit weights force z = 0.
        SplitMix64 rng(substream_id({5, (std::uint64_t)t}));
        std::vector<double> x(n), w(n, 1.0);
        for (std::size_t i = 0; i < n / 2; ++i) {
            x[i] = 2.0 * rng.next_unit() - 1.0;
            x[i + n / 2] = -x[i];
        }
        auto xs = encode_all(x, m, substream_id({6, (std::uint64_t)t}));
        auto ws = encode_all(w, m, substream_id({7, (std::uint64_t)t}));
        mean += decode(apc_neuron_forward(xs, ws, ApcNeuronConfig::for_fan_in(n, m)));
    }
    CHECK(std::abs(mean / trials) <= 0.1);
}

TEST_CASE("btanh saturates high on all-ones products") {
    std::vector<std::uint32_t> counts(256, 16);  // n = 16, every product bit 1
    CHECK(decode(btanh_activate(counts, 16, 32)) == 1.0);
}

TEST_CASE("btanh tracks tanh at z=1 with the calibrated state count") {
    const std::size_t n = 16, m = 8192;
    std::vector<double> x(n, 1.0 / 16.0), w(n, 1.0);
    auto xs = encode_all(x, m, 101);
    auto ws = encode_all(w, m, 102);
    const double out = decode(apc_neuron_forward(xs, ws, ApcNeuronConfig::for_fan_in(n, m)));
    CHECK(std::abs(out - std::tanh(1.0)) <= 0.1);
}

TEST_CASE("btanh rejects bad arguments") {
    std::vector<std::uint32_t> counts{0, 1, 5};
    CHECK_THROWS_AS(btanh_activate(counts, 4, 8), std::invalid_argument);  // count 5 > n
    std::vector<std::uint32_t> ok{0, 1, 2};
    CHECK_THROWS_AS(btanh_activate(ok, 4, 7), std::invalid_argument);  // odd S
    CHECK_THROWS_AS(btanh_activate(ok, 4, 0), std::invalid_argument);
}

TEST_CASE("apc neuron with identity weight reduces to tanh of the input") {
    const std::size_t m = 8192;
    std::vector<double> x{0.5}, w{1.0};
    auto xs = encode_all(x, m, 201);
    auto ws = encode_all(w, m, 202);
    const double out = decode(apc_neuron_forward(xs, ws, ApcNeuronConfig::for_fan_in(1, m)));
    CHECK(std::abs(out - std::tanh(0.5)) <= 0.1);
}

TEST_CASE("apc neuron validates stream shapes") {
    auto xs = encode_all(std::vector<double>{0.5, 0.25}, 128, 301);
    auto ws = encode_all(std::vector<double>{1.0}, 128, 302);
    CHECK_THROWS_AS(apc_neuron_forward(xs, ws, ApcNeuronConfig::for_fan_in(2, 128)),
                    std::invalid_argument);
    auto ws2 = encode_all(std::vector<double>{1.0, 1.0}, 64, 303);
    CHECK_THROWS_AS(apc_neuron_forward(xs, ws2, ApcNeuronConfig::for_fan_in(2, 128)),
                    std::invalid_argument);
}

TEST_CASE("stanh saturates and stays centered") {
    auto ones = generate_stream(1.0, 512, CodingFormat::Bipolar, kGen, 401);
    CHECK(decode(stanh_activate(ones, 8)) == 1.0);

    auto zero = generate_stream(0.0, 8192, CodingFormat::Bipolar, kGen, 402);
    CHECK(std::abs(decode(stanh_activate(zero, 8))) <= 0.1);
}

TEST_CASE("stanh approximates tanh(K*x/2)") {
    auto half = generate_stream(0.5, 8192, CodingFormat::Bipolar, kGen, 403);
    const double out = decode(stanh_activate(half, 4));  // tanh(4*0.5/2) = tanh(1)
    CHECK(std::abs(out - std::tanh(1.0)) <= 0.1);
}

TEST_CASE("stanh rejects bad state counts and codings") {
    auto s = generate_stream(0.5, 64, CodingFormat::Bipolar, kGen, 404);
    CHECK_THROWS_AS(stanh_activate(s, 5), std::invalid_argument);
    auto uni = StochasticStream::from_bits("0110", CodingFormat::Unipolar);
    CHECK_THROWS_AS(stanh_activate(uni, 4), std::invalid_argument);
}

TEST_CASE("stanh mirror symmetry holds after the first saturation") {
    const std::size_t m = 4096;
    const unsigned K = 8;
    auto input = generate_stream(0.6, m, CodingFormat::Bipolar, kGen, 405);
    std::string flipped = input.to_bit_string();
    for (auto& c : flipped) c = c == '1' ? '0' : '1';
    auto negated = StochasticStream::from_bits(flipped, CodingFormat::Bipolar);

    auto out = stanh_activate(input, K);
    auto out_neg = stanh_activate(negated, K);

    // Reference walk to find the first boundary hit; the complementary
    // trajectory is an exact mirror from that point on.
    std::size_t first_clamp = m;
    int s = K / 2;
    for (std::size_t t = 0; t < m; ++t) {
        s += input.bit(t) ? 1 : -1;
        if (s < 0 || s > int(K) - 1) {
            s = std::clamp(s, 0, int(K) - 1);
            if (first_clamp == m) first_clamp = t;
        }
    }
    REQUIRE(first_clamp < m / 4);  // a biased stream saturates early
    for (std::size_t t = first_clamp + 1; t < m; ++t) CHECK(out.bit(t) != out_neg.bit(t));
    CHECK(std::abs(decode(out) + decode(out_neg)) <= 2.0 * double(first_clamp + 2) / double(m));
}

TEST_CASE("all-ones input dominates any other input sequence") {
    const std::size_t m = 2048;
    auto ones = generate_stream(1.0, m, CodingFormat::Bipolar, kGen, 501);
    const double top_stanh = decode(stanh_activate(ones, 16));
    for (int i = 0; i < 10; ++i) {
        SplitMix64 rng(substream_id({50, (std::uint64_t)i}));
        auto s = generate_stream(2.0 * rng.next_unit() - 1.0, m, CodingFormat::Bipolar, kGen,
                                 substream_id({51, (std::uint64_t)i}));
        CHECK(decode(stanh_activate(s, 16)) <= top_stanh);
    }

    std::vector<std::uint32_t> full(m, 8);
    const double top_btanh = decode(btanh_activate(full, 8, 16));
    for (int i = 0; i < 10; ++i) {
        SplitMix64 rng(substream_id({52, (std::uint64_t)i}));
        std::vector<std::uint32_t> counts(m);
        for (auto& c : counts) c = rng.next_below(9);
        CHECK(decode(btanh_activate(counts, 8, 16)) <= top_btanh);
    }
}

TEST_CASE("mux neuron with n=1 reduces to the single product") {
    const std::size_t m = 8192;
    auto xs = encode_all(std::vector<double>{0.5}, m, 601);
    auto ws = encode_all(std::vector<double>{1.0}, m, 602);
    auto cfg = MuxNeuronConfig::for_fan_in(1, m);
    CHECK(cfg.fsm_states == 2);
    const double out = decode(mux_neuron_forward(xs, ws, cfg, kGen, 603));
    CHECK(std::abs(out - std::tanh(0.5)) <= 0.1);
}

TEST_CASE("average pool basics") {
    const std::size_t m = 8192;
    auto s = generate_stream(0.3, m, CodingFormat::Bipolar, kGen, 701);
    std::vector<StochasticStream> copies{s, s, s, s};
    CHECK(average_pool(copies, kGen, 1) == s);

    std::vector<StochasticStream> pm;
    const double vals[] = {1.0, 1.0, -1.0, -1.0};
    for (std::size_t i = 0; i < 4; ++i)
        pm.push_back(generate_stream(vals[i], m, CodingFormat::Bipolar, kGen, 710 + i));
    CHECK(std::abs(decode(average_pool(pm, kGen, 2))) <= 0.05);

    std::vector<StochasticStream> same;
    for (std::size_t i = 0; i < 4; ++i)
        same.push_back(generate_stream(0.8, m, CodingFormat::Bipolar, kGen, 720 + i));
    CHECK(decode(average_pool(same, kGen, 3)) == doctest::Approx(0.8).epsilon(0.07));

    std::vector<StochasticStream> one{s};
    CHECK_THROWS_AS(average_pool(one, kGen, 4), std::invalid_argument);
}

TEST_CASE("reference neuron closed forms") {
    std::vector<double> z4(4, 0.0);
    CHECK(reference_neuron(z4, z4) == doctest::Approx(0.0));
    std::vector<double> one{1.0};
    CHECK(reference_neuron(one, one) == doctest::Approx(0.7615941559557649));
    std::vector<double> x{0.5, -0.5}, w{1.0, 1.0};
    CHECK(reference_neuron(x, w) == doctest::Approx(0.0));
    std::vector<double> bad{1.5};
    CHECK_THROWS_AS(reference_neuron(bad, one), std::domain_error);
}

TEST_CASE("forward outputs keep length and coding") {
    const std::size_t n = 4, m = 256;
    std::vector<double> vals{0.2, -0.6, 0.4, 0.1};
    std::vector<double> wvals{0.9, 0.3, -0.5, 0.7};
    auto xs = encode_all(vals, m, 801);
    auto ws = encode_all(wvals, m, 802);
    auto apc = apc_neuron_forward(xs, ws, ApcNeuronConfig::for_fan_in(n, m));
    CHECK(apc.length() == m);
    CHECK(apc.coding() == CodingFormat::Bipolar);
    auto mux = mux_neuron_forward(xs, ws, MuxNeuronConfig::for_fan_in(n, m), kGen, 803);
    CHECK(mux.length() == m);
    CHECK(mux.coding() == CodingFormat::Bipolar);
}
