#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "scdnn/neuron.hpp"

namespace scdnn {

// One Monte Carlo sweep: fan_ins x stream_lengths, `trials` random
// neurons each, inputs and weights i.i.d. uniform on [-1, 1].
struct TrialPlan {
    NeuronKind impl = NeuronKind::Apc;
    std::vector<std::size_t> fan_ins;
    std::vector<std::size_t> stream_lengths;
    std::size_t trials = 1000;
    std::uint64_t seed = 0;
};

// Absolute error is the standard deviation of (decoded output - tanh(z))
// over the trials; the mean is tracked to confirm the error is centered.
struct ErrorProfile {
    NeuronKind impl;
    std::size_t fan_in;
    std::size_t stream_length;
    std::size_t trials;
    double absolute_error;
    double mean_error;
};

// threads = 0 picks the hardware concurrency. Trials land in a
// per-index buffer and are reduced in index order, so the result is
// bit-identical for any thread count.
ErrorProfile measure_absolute_error(NeuronKind impl, std::size_t fan_in,
                                    std::size_t stream_length, std::size_t trials,
                                    std::uint64_t seed, unsigned threads = 0);

std::vector<ErrorProfile> sweep(const TrialPlan& plan, unsigned threads = 0);

// Picks the Btanh state count minimizing max |mean decoded - tanh(z)|
// over the z grid; ties break toward the smaller candidate.
unsigned calibrate_btanh_states(std::size_t fan_in, std::size_t stream_length,
                                std::span<const unsigned> candidates,
                                std::span<const double> z_grid, std::size_t trials,
                                std::uint64_t seed);

// Per-candidate max deviations, in candidate order (calibration detail view).
std::vector<double> btanh_calibration_deviations(std::size_t fan_in, std::size_t stream_length,
                                                 std::span<const unsigned> candidates,
                                                 std::span<const double> z_grid,
                                                 std::size_t trials, std::uint64_t seed);

std::string profiles_to_csv(std::span<const ErrorProfile> profiles);
void export_profiles(std::span<const ErrorProfile> profiles, const std::filesystem::path& path);

const char* neuron_kind_name(NeuronKind kind);

}  // namespace scdnn
