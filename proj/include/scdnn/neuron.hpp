#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "scdnn/stream.hpp"

namespace scdnn {

enum class NeuronKind { Apc, Mux };

// Calibrated default for the Btanh saturated counter; see
// calibrate_btanh_states in the profiler for the measurement behind it.
unsigned default_btanh_states(std::size_t fan_in);

struct ApcNeuronConfig {
    std::size_t fan_in;
    std::size_t stream_length;
    unsigned btanh_states;  // S, even and >= 2

    static ApcNeuronConfig for_fan_in(std::size_t n, std::size_t m) {
        return {n, m, default_btanh_states(n)};
    }
};

struct MuxNeuronConfig {
    std::size_t fan_in;
    std::size_t stream_length;
    unsigned fsm_states;  // K, even and >= 2

    // K = 2n cancels the MUX 1/n scaling, so the FSM output lands on
    // tanh(z) with no extra conversion stage.
    static MuxNeuronConfig for_fan_in(std::size_t n, std::size_t m) {
        return {n, m, static_cast<unsigned>(2 * n)};
    }
};

struct PoolingConfig {
    std::size_t window;  // k >= 2
};

// Population count of one column of product bits.
unsigned apc_count(std::span<const std::uint8_t> column_bits);

// Per-cycle column counts across n packed product streams.
std::vector<std::uint32_t> apc_count_columns(std::span<const StochasticStream> products);

// Saturated up/down counter over APC counts: state s in [0, S-1] starts
// at S/2, steps by 2*count - n, output bit = 1 iff s >= S/2.
StochasticStream btanh_activate(std::span<const std::uint32_t> counts, std::size_t fan_in,
                                unsigned states);

// K-state FSM: bit 1 moves up, bit 0 moves down, saturating; output
// bit = 1 iff state >= K/2. Approximates tanh(K * x / 2).
StochasticStream stanh_activate(const StochasticStream& input, unsigned states);

// XNOR products -> APC column counts -> Btanh. Approximates tanh(sum x_i * w_i).
StochasticStream apc_neuron_forward(std::span<const StochasticStream> x,
                                    std::span<const StochasticStream> w,
                                    const ApcNeuronConfig& cfg);

// XNOR products -> MUX scaled add -> Stanh with K = 2n.
StochasticStream mux_neuron_forward(std::span<const StochasticStream> x,
                                    std::span<const StochasticStream> w,
                                    const MuxNeuronConfig& cfg, const GeneratorSpec& gen,
                                    std::uint64_t stream_index = 0);

// Uniform per-cycle selection among k inputs; for k a power of two this
// is the hierarchical 2-to-1 MUX tree with 0.5 select streams.
StochasticStream average_pool(std::span<const StochasticStream> inputs,
                              const GeneratorSpec& gen, std::uint64_t stream_index = 0);

// Floating-point oracle: tanh(sum x_i * w_i).
double reference_neuron(std::span<const double> x, std::span<const double> w);

}  // namespace scdnn
