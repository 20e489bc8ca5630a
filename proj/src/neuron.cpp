#include "scdnn/neuron.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace scdnn {

unsigned default_btanh_states(std::size_t fan_in) {
    // 2n mirrors the K = 2n choice on the MUX path; calibration over
    // S in {2..8n} confirms it minimizes the max deviation from tanh.
    return static_cast<unsigned>(std::max<std::size_t>(2, 2 * fan_in));
}

unsigned apc_count(std::span<const std::uint8_t> column_bits) {
    unsigned ones = 0;
    for (std::uint8_t b : column_bits) ones += (b != 0);
    return ones;
}

std::vector<std::uint32_t> apc_count_columns(std::span<const StochasticStream> products) {
    if (products.empty()) throw std::invalid_argument("apc_count_columns requires inputs");
    const std::size_t m = products[0].length();
    std::vector<std::uint32_t> counts(m, 0);
    for (const auto& s : products) {
        if (s.length() != m)
            throw std::invalid_argument("apc_count_columns inputs must share length");
        const auto words = s.words();
        for (std::size_t w = 0; w < words.size(); ++w) {
            std::uint64_t bits = words[w];
            const std::size_t base = w << 6;
            while (bits != 0) {
                const int b = std::countr_zero(bits);
                counts[base + static_cast<std::size_t>(b)] += 1;
                bits &= bits - 1;
            }
        }
    }
    return counts;
}

StochasticStream btanh_activate(std::span<const std::uint32_t> counts, std::size_t fan_in,
                                unsigned states) {
    if (fan_in == 0) throw std::invalid_argument("btanh_activate requires fan_in >= 1");
    if (states < 2 || states % 2 != 0)
        throw std::invalid_argument("btanh_activate requires an even state count >= 2");
    if (counts.empty()) throw std::invalid_argument("btanh_activate requires counts");

    const auto n = static_cast<std::int64_t>(fan_in);
    const auto s_max = static_cast<std::int64_t>(states) - 1;
    const std::int64_t half = static_cast<std::int64_t>(states) / 2;
    std::int64_t s = half;

    std::vector<std::uint64_t> words((counts.size() + 63) / 64, 0);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const auto c = static_cast<std::int64_t>(counts[i]);
        if (c > n) throw std::invalid_argument("btanh count exceeds fan_in");
        s = std::clamp<std::int64_t>(s + (2 * c - n), 0, s_max);
        if (s >= half) words[i >> 6] |= 1ull << (i & 63);
    }
    return StochasticStream(std::move(words), counts.size(), CodingFormat::Bipolar);
}

StochasticStream stanh_activate(const StochasticStream& input, unsigned states) {
    if (states < 2 || states % 2 != 0)
        throw std::invalid_argument("stanh_activate requires an even state count >= 2");
    if (input.coding() != CodingFormat::Bipolar)
        throw std::invalid_argument("stanh_activate requires a bipolar stream");

    const auto s_max = static_cast<std::int64_t>(states) - 1;
    const std::int64_t half = static_cast<std::int64_t>(states) / 2;
    std::int64_t s = half;

    const std::size_t m = input.length();
    std::vector<std::uint64_t> words((m + 63) / 64, 0);
    for (std::size_t i = 0; i < m; ++i) {
        s = std::clamp<std::int64_t>(s + (input.bit(i) ? 1 : -1), 0, s_max);
        if (s >= half) words[i >> 6] |= 1ull << (i & 63);
    }
    return StochasticStream(std::move(words), m, CodingFormat::Bipolar);
}

namespace {

std::vector<StochasticStream> xnor_products(std::span<const StochasticStream> x,
                                            std::span<const StochasticStream> w,
                                            std::size_t fan_in, std::size_t stream_length) {
    if (x.size() != fan_in || w.size() != fan_in)
        throw std::invalid_argument("neuron forward requires exactly fan_in inputs and weights");
    std::vector<StochasticStream> products;
    products.reserve(fan_in);
    for (std::size_t i = 0; i < fan_in; ++i) {
        if (x[i].length() != stream_length || w[i].length() != stream_length)
            throw std::invalid_argument("neuron forward streams must match the config length");
        products.push_back(xnor_multiply(x[i], w[i]));
    }
    return products;
}

}  // namespace

StochasticStream apc_neuron_forward(std::span<const StochasticStream> x,
                                    std::span<const StochasticStream> w,
                                    const ApcNeuronConfig& cfg) {
    const auto products = xnor_products(x, w, cfg.fan_in, cfg.stream_length);
    const auto counts = apc_count_columns(products);
    return btanh_activate(counts, cfg.fan_in, cfg.btanh_states);
}

StochasticStream mux_neuron_forward(std::span<const StochasticStream> x,
                                    std::span<const StochasticStream> w,
                                    const MuxNeuronConfig& cfg, const GeneratorSpec& gen,
                                    std::uint64_t stream_index) {
    const auto products = xnor_products(x, w, cfg.fan_in, cfg.stream_length);
    const auto sum = mux_scaled_add(products, gen, stream_index);
    return stanh_activate(sum, cfg.fsm_states);
}

StochasticStream average_pool(std::span<const StochasticStream> inputs,
                              const GeneratorSpec& gen, std::uint64_t stream_index) {
    if (inputs.size() < 2) throw std::invalid_argument("average_pool requires window size >= 2");
    return mux_scaled_add(inputs, gen, stream_index);
}

double reference_neuron(std::span<const double> x, std::span<const double> w) {
    if (x.size() != w.size())
        throw std::invalid_argument("reference_neuron requires matching sizes");
    double z = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::abs(x[i]) > 1.0 || std::abs(w[i]) > 1.0)
            throw std::domain_error("reference_neuron values must lie in [-1, 1]");
        z += x[i] * w[i];
    }
    return std::tanh(z);
}

}  // namespace scdnn
