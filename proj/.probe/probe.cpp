// Scratch numeric probe (not part of the build): Table-1 levels, Btanh calibration.
#include <cmath>
#include <cstdio>
#include <vector>
#include <chrono>
#include "scdnn/profiler.hpp"

using namespace scdnn;

int main() {
    auto t0 = std::chrono::steady_clock::now();
    // Table 1 check: APC/MUX at n=16/32/64, m=1024, 1000 trials.
    for (auto impl : {NeuronKind::Apc, NeuronKind::Mux}) {
        for (std::size_t n : {16, 32, 64}) {
            auto p = measure_absolute_error(impl, n, 1024, 1000, 7, 0);
            std::printf("%s n=%zu m=1024: abs=%.4f mean=%+.4f\n", neuron_kind_name(impl), n,
                        p.absolute_error, p.mean_error);
        }
    }
    auto t1 = std::chrono::steady_clock::now();
    std::printf("table1 time: %.1fs\n", std::chrono::duration<double>(t1 - t0).count());

    // m sweep for monotonicity feel.
    for (auto impl : {NeuronKind::Apc, NeuronKind::Mux}) {
        for (std::size_t m : {128, 256, 512, 1024}) {
            auto p = measure_absolute_error(impl, 16, m, 1000, 7, 0);
            std::printf("%s n=16 m=%zu: abs=%.4f\n", neuron_kind_name(impl), m, p.absolute_error);
        }
    }

    // Btanh calibration, n=16.
    std::vector<unsigned> cands{8, 16, 32, 64, 128};
    std::vector<double> grid{-2, -1, 0, 1, 2};
    auto devs = btanh_calibration_deviations(16, 8192, cands, grid, 50, 11);
    for (std::size_t i = 0; i < cands.size(); ++i)
        std::printf("S=%u maxdev=%.4f\n", cands[i], devs[i]);
    std::printf("chosen S(n=16) = %u\n", calibrate_btanh_states(16, 8192, cands, grid, 50, 11));

    std::vector<unsigned> cands1{2, 4, 8};
    std::vector<double> grid1{-1, -0.5, 0, 0.5, 1};
    auto devs1 = btanh_calibration_deviations(1, 8192, cands1, grid1, 50, 11);
    for (std::size_t i = 0; i < cands1.size(); ++i)
        std::printf("n=1 S=%u maxdev=%.4f\n", cands1[i], devs1[i]);

    // Eq.1 fidelity probe: MUX K=2n and APC S=2n at n=16, m=8192, 50 seeds.
    for (double z : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
        const std::size_t n = 16, m = 8192;
        double mux_sum = 0, apc_sum = 0;
        const int seeds = 50;
        for (int sd = 0; sd < seeds; ++sd) {
            GeneratorSpec g{GeneratorMethod::Bernoulli, static_cast<std::uint64_t>(100 + sd), 16};
            std::vector<StochasticStream> xs, ws;
            for (std::size_t i = 0; i < n; ++i) {
                xs.push_back(generate_stream(z / double(n), m, CodingFormat::Bipolar, g,
                                             substream_id({0ull, 0ull, i})));
                ws.push_back(generate_stream(1.0, m, CodingFormat::Bipolar, g,
                                             substream_id({0ull, 1ull, i})));
            }
            mux_sum += decode(mux_neuron_forward(xs, ws, MuxNeuronConfig::for_fan_in(n, m), g,
                                                 substream_id({0ull, 2ull})));
            apc_sum += decode(apc_neuron_forward(xs, ws, ApcNeuronConfig::for_fan_in(n, m)));
        }
        std::printf("z=%+.1f tanh=%+.4f mux=%+.4f apc=%+.4f\n", z, std::tanh(z), mux_sum / seeds,
                    apc_sum / seeds);
    }
    return 0;
}
