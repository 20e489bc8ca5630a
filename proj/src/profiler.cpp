#include "scdnn/profiler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <thread>

namespace scdnn {

namespace {

// Stream-index roles inside one trial.
constexpr std::uint64_t kRoleInput = 0;
constexpr std::uint64_t kRoleWeight = 1;
constexpr std::uint64_t kRoleSelect = 2;

double run_one_trial(NeuronKind impl, std::size_t n, std::size_t m, std::uint64_t seed,
                     std::size_t trial) {
    // Trial-local draw of x, w; the value generator is separate from the
    // bit-stream generators so stream indices never collide with it.
    SplitMix64 values(substream_id({seed, trial, 0x76616Cull}));
    std::vector<double> x(n), w(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = 2.0 * values.next_unit() - 1.0;
    for (std::size_t i = 0; i < n; ++i) w[i] = 2.0 * values.next_unit() - 1.0;

    const GeneratorSpec gen{GeneratorMethod::Bernoulli, seed, 16};
    std::vector<StochasticStream> xs, ws;
    xs.reserve(n);
    ws.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        xs.push_back(generate_stream(x[i], m, CodingFormat::Bipolar, gen,
                                     substream_id({trial, kRoleInput, i})));
    for (std::size_t i = 0; i < n; ++i)
        ws.push_back(generate_stream(w[i], m, CodingFormat::Bipolar, gen,
                                     substream_id({trial, kRoleWeight, i})));

    StochasticStream out =
        impl == NeuronKind::Apc
            ? apc_neuron_forward(xs, ws, ApcNeuronConfig::for_fan_in(n, m))
            : mux_neuron_forward(xs, ws, MuxNeuronConfig::for_fan_in(n, m), gen,
                                 substream_id({trial, kRoleSelect}));
    return decode(out) - reference_neuron(x, w);
}

void run_trials(NeuronKind impl, std::size_t n, std::size_t m, std::uint64_t seed,
                std::vector<double>& errors, unsigned threads) {
    const std::size_t trials = errors.size();
    unsigned want = threads != 0 ? threads : std::thread::hardware_concurrency();
    want = std::max(1u, std::min<unsigned>(want, static_cast<unsigned>(trials)));

    if (want == 1) {
        for (std::size_t t = 0; t < trials; ++t) errors[t] = run_one_trial(impl, n, m, seed, t);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(want);
    for (unsigned id = 0; id < want; ++id) {
        workers.emplace_back([&, id] {
            for (std::size_t t = id; t < trials; t += want)
                errors[t] = run_one_trial(impl, n, m, seed, t);
        });
    }
    for (auto& th : workers) th.join();
}

}  // namespace

ErrorProfile measure_absolute_error(NeuronKind impl, std::size_t fan_in,
                                    std::size_t stream_length, std::size_t trials,
                                    std::uint64_t seed, unsigned threads) {
    if (trials == 0) throw std::invalid_argument("measure_absolute_error requires trials >= 1");
    if (fan_in == 0 || stream_length == 0)
        throw std::invalid_argument("measure_absolute_error requires fan_in and length >= 1");

    std::vector<double> errors(trials);
    run_trials(impl, fan_in, stream_length, seed, errors, threads);

    // Index-ordered reduction keeps parallel and serial runs bit-identical.
    double mean = 0.0;
    for (double e : errors) mean += e;
    mean /= static_cast<double>(trials);
    double var = 0.0;
    for (double e : errors) var += (e - mean) * (e - mean);
    var /= static_cast<double>(trials);  // population variance

    return {impl, fan_in, stream_length, trials, std::sqrt(var), mean};
}

std::vector<ErrorProfile> sweep(const TrialPlan& plan, unsigned threads) {
    if (plan.fan_ins.empty() || plan.stream_lengths.empty())
        throw std::invalid_argument("sweep requires nonempty fan_ins and stream_lengths");
    if (plan.trials < 30)
        throw std::invalid_argument("sweep requires trials >= 30 for a reported statistic");
    std::vector<ErrorProfile> out;
    out.reserve(plan.fan_ins.size() * plan.stream_lengths.size());
    for (std::size_t n : plan.fan_ins)
        for (std::size_t m : plan.stream_lengths)
            out.push_back(measure_absolute_error(plan.impl, n, m, plan.trials, plan.seed, threads));
    return out;
}

std::vector<double> btanh_calibration_deviations(std::size_t fan_in, std::size_t stream_length,
                                                 std::span<const unsigned> candidates,
                                                 std::span<const double> z_grid,
                                                 std::size_t trials, std::uint64_t seed) {
    if (candidates.empty()) throw std::invalid_argument("calibration requires candidates");
    if (z_grid.empty()) throw std::invalid_argument("calibration requires a z grid");
    if (trials == 0) throw std::invalid_argument("calibration requires trials >= 1");
    for (unsigned s : candidates)
        if (s < 2 || s % 2 != 0)
            throw std::invalid_argument("candidate state counts must be even and >= 2");
    const auto nd = static_cast<double>(fan_in);
    for (double z : z_grid)
        if (std::abs(z) > nd) throw std::invalid_argument("z grid values must lie in [-n, n]");

    const GeneratorSpec gen{GeneratorMethod::Bernoulli, seed, 16};
    std::vector<double> deviations;
    deviations.reserve(candidates.size());
    for (unsigned S : candidates) {
        double worst = 0.0;
        for (std::size_t gi = 0; gi < z_grid.size(); ++gi) {
            const double z = z_grid[gi];
            double sum = 0.0;
            for (std::size_t t = 0; t < trials; ++t) {
                // Realize z with x_i = z/n against unit weights; streams are
                // keyed by (grid point, trial) so candidates see identical bits.
                std::vector<StochasticStream> xs, ws;
                xs.reserve(fan_in);
                ws.reserve(fan_in);
                for (std::size_t i = 0; i < fan_in; ++i) {
                    xs.push_back(generate_stream(z / nd, stream_length, CodingFormat::Bipolar,
                                                 gen, substream_id({gi, t, kRoleInput, i})));
                    ws.push_back(generate_stream(1.0, stream_length, CodingFormat::Bipolar, gen,
                                                 substream_id({gi, t, kRoleWeight, i})));
                }
                sum += decode(apc_neuron_forward(xs, ws, {fan_in, stream_length, S}));
            }
            const double dev = std::abs(sum / static_cast<double>(trials) - std::tanh(z));
            worst = std::max(worst, dev);
        }
        deviations.push_back(worst);
    }
    return deviations;
}

unsigned calibrate_btanh_states(std::size_t fan_in, std::size_t stream_length,
                                std::span<const unsigned> candidates,
                                std::span<const double> z_grid, std::size_t trials,
                                std::uint64_t seed) {
    const auto deviations =
        btanh_calibration_deviations(fan_in, stream_length, candidates, z_grid, trials, seed);
    std::size_t best = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        const bool better = deviations[i] < deviations[best];
        const bool tie_smaller = deviations[i] == deviations[best] &&
                                 candidates[i] < candidates[best];
        if (better || tie_smaller) best = i;
    }
    return candidates[best];
}

const char* neuron_kind_name(NeuronKind kind) {
    return kind == NeuronKind::Apc ? "APC" : "MUX";
}

std::string profiles_to_csv(std::span<const ErrorProfile> profiles) {
    std::string out = "impl,n,m,trials,abs_error,mean_error\n";
    char line[160];
    for (const auto& p : profiles) {
        std::snprintf(line, sizeof(line), "%s,%zu,%zu,%zu,%.9g,%.9g\n", neuron_kind_name(p.impl),
                      p.fan_in, p.stream_length, p.trials, p.absolute_error, p.mean_error);
        out += line;
    }
    return out;
}

void export_profiles(std::span<const ErrorProfile> profiles, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    f << profiles_to_csv(profiles);
    if (!f.flush()) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace scdnn
