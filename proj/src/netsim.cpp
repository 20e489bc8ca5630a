#include "scdnn/netsim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "scdnn/errors.hpp"

namespace scdnn {

namespace {

// Stream-index roles inside one forward pass.
constexpr std::uint64_t kRoleInput = 0;
constexpr std::uint64_t kRoleWeight = 1;
constexpr std::uint64_t kRoleSelect = 2;
constexpr std::uint64_t kRolePool = 3;

std::string join_ids(std::span<const std::string> ids) {
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i != 0) out += "+";
        out += ids[i];
    }
    return out;
}

}  // namespace

void NetworkSpec::validate(std::size_t input_dim) const {
    if (layers.empty()) throw std::invalid_argument("network needs at least one layer");
    std::size_t arity = input_dim;
    for (const auto& l : layers) {
        if (l.neuron_count == 0)
            throw std::invalid_argument("layer " + l.id + " needs neuron_count >= 1");
        if (l.kind == LayerKind::InnerProduct) {
            if (l.fan_in < 1)
                throw std::invalid_argument("layer " + l.id + " needs fan_in >= 1");
            if (l.fan_in != arity)
                throw std::invalid_argument("layer " + l.id + " fan_in " +
                                            std::to_string(l.fan_in) +
                                            " does not match incoming width " +
                                            std::to_string(arity));
        } else {
            if (l.fan_in < 2)
                throw std::invalid_argument("layer " + l.id + " needs window >= 2");
            if (l.neuron_count * l.fan_in != arity)
                throw std::invalid_argument("layer " + l.id + " pools " +
                                            std::to_string(l.neuron_count * l.fan_in) +
                                            " values but incoming width is " +
                                            std::to_string(arity));
        }
        arity = l.neuron_count;
    }
}

std::vector<const LayerSpec*> NetworkSpec::inner_product_layers() const {
    std::vector<const LayerSpec*> out;
    for (const auto& l : layers)
        if (l.kind == LayerKind::InnerProduct) out.push_back(&l);
    return out;
}

const LayerSpec* NetworkSpec::find_layer(const std::string& id) const {
    for (const auto& l : layers)
        if (l.id == id) return &l;
    return nullptr;
}

void WeightSet::validate(const NetworkSpec& net) const {
    for (const auto* l : net.inner_product_layers()) {
        auto it = by_layer.find(l->id);
        if (it == by_layer.end())
            throw std::invalid_argument("missing weight matrix for layer " + l->id);
        const auto& mat = it->second;
        if (mat.size() != l->neuron_count)
            throw std::invalid_argument("layer " + l->id + " expects " +
                                        std::to_string(l->neuron_count) + " weight rows, got " +
                                        std::to_string(mat.size()));
        for (const auto& row : mat) {
            if (row.size() != l->fan_in)
                throw std::invalid_argument("layer " + l->id + " expects " +
                                            std::to_string(l->fan_in) + " weights per row");
            for (double v : row)
                if (std::abs(v) > 1.0)
                    throw std::invalid_argument("layer " + l->id +
                                                " weight outside [-1, 1]: " + std::to_string(v));
        }
    }
}

std::vector<double> float_forward_outputs(const NetworkSpec& net, const WeightSet& weights,
                                          std::span<const double> input) {
    net.validate(input.size());
    weights.validate(net);
    std::vector<double> acts(input.begin(), input.end());
    for (const auto& l : net.layers) {
        std::vector<double> next(l.neuron_count, 0.0);
        if (l.kind == LayerKind::InnerProduct) {
            const auto& mat = weights.by_layer.at(l.id);
            for (std::size_t q = 0; q < l.neuron_count; ++q) {
                double z = 0.0;
                for (std::size_t i = 0; i < l.fan_in; ++i) z += mat[q][i] * acts[i];
                next[q] = std::tanh(z);
            }
        } else {
            for (std::size_t q = 0; q < l.neuron_count; ++q) {
                double sum = 0.0;
                for (std::size_t i = 0; i < l.fan_in; ++i) sum += acts[q * l.fan_in + i];
                next[q] = sum / static_cast<double>(l.fan_in);
            }
        }
        acts = std::move(next);
    }
    return acts;
}

namespace {

std::size_t argmax_lowest(std::span<const double> v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

}  // namespace

std::size_t float_forward(const NetworkSpec& net, const WeightSet& weights,
                          std::span<const double> input) {
    const auto outs = float_forward_outputs(net, weights, input);
    return argmax_lowest(outs);
}

std::size_t sc_forward(const NetworkSpec& net, const WeightSet& weights,
                       const KindAssignment& assignment, std::span<const double> input,
                       std::size_t stream_length, const GeneratorSpec& gen) {
    if (stream_length == 0) throw std::invalid_argument("stream_length must be >= 1");
    net.validate(input.size());
    weights.validate(net);
    for (const auto* l : net.inner_product_layers())
        if (!assignment.contains(l->id))
            throw std::invalid_argument("missing assignment entry for layer " + l->id);

    std::vector<StochasticStream> acts;
    acts.reserve(input.size());
    for (std::size_t j = 0; j < input.size(); ++j) {
        if (std::abs(input[j]) > 1.0)
            throw std::invalid_argument("input value outside [-1, 1]");
        acts.push_back(generate_stream(input[j], stream_length, CodingFormat::Bipolar, gen,
                                       substream_id({kRoleInput, j})));
    }

    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        const auto& l = net.layers[li];
        std::vector<StochasticStream> next;
        next.reserve(l.neuron_count);
        if (l.kind == LayerKind::InnerProduct) {
            const auto& mat = weights.by_layer.at(l.id);
            const NeuronKind kind = assignment.at(l.id);
            for (std::size_t q = 0; q < l.neuron_count; ++q) {
                std::vector<StochasticStream> ws;
                ws.reserve(l.fan_in);
                for (std::size_t i = 0; i < l.fan_in; ++i)
                    ws.push_back(generate_stream(mat[q][i], stream_length, CodingFormat::Bipolar,
                                                 gen, substream_id({kRoleWeight, li, q, i})));
                if (kind == NeuronKind::Apc) {
                    next.push_back(apc_neuron_forward(
                        acts, ws, ApcNeuronConfig::for_fan_in(l.fan_in, stream_length)));
                } else {
                    next.push_back(mux_neuron_forward(
                        acts, ws, MuxNeuronConfig::for_fan_in(l.fan_in, stream_length), gen,
                        substream_id({kRoleSelect, li, q})));
                }
            }
        } else {
            for (std::size_t q = 0; q < l.neuron_count; ++q) {
                const std::span<const StochasticStream> window(acts.data() + q * l.fan_in,
                                                               l.fan_in);
                next.push_back(average_pool(window, gen, substream_id({kRolePool, li, q})));
            }
        }
        acts = std::move(next);
    }

    std::vector<double> outs;
    outs.reserve(acts.size());
    for (const auto& s : acts) outs.push_back(decode(s));
    return argmax_lowest(outs);
}

double estimate_error_rate(const NetworkSpec& net, const WeightSet& weights,
                           const KindAssignment& assignment, std::span<const Sample> samples,
                           std::size_t stream_length, const GeneratorSpec& gen) {
    if (samples.empty()) throw std::invalid_argument("estimate_error_rate requires samples");
    std::size_t wrong = 0;
    for (std::size_t s = 0; s < samples.size(); ++s) {
        // Per-sample generator family keeps samples statistically independent
        // while the whole estimate stays a pure function of (gen, samples).
        GeneratorSpec sample_gen = gen;
        sample_gen.seed = substream_id({gen.seed, s, 0x73616D70ull});
        const std::size_t predicted =
            sc_forward(net, weights, assignment, samples[s].input, stream_length, sample_gen);
        if (predicted != samples[s].label) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(samples.size());
}

TableLookupProvider::TableLookupProvider(std::vector<ErrorTableEntry> entries,
                                         std::size_t layer_count)
    : entries_(std::move(entries)) {
    for (auto& e : entries_) {
        if (!(e.error_percent >= 0.0 && e.error_percent <= 100.0))
            throw ConfigError("error rate for configuration " + e.id +
                              " outside [0, 100]%: " + std::to_string(e.error_percent));
        if (e.error_percent == 100.0)
            throw ConfigError("error rate for configuration " + e.id +
                              " must stay below 100%");
        if (e.assignment.empty()) e.assignment.assign(layer_count, e.id);
        if (e.assignment.size() != layer_count)
            throw ConfigError("configuration " + e.id + " lists " +
                              std::to_string(e.assignment.size()) + " layer entries, expected " +
                              std::to_string(layer_count));
        const double err = e.error_percent / 100.0;
        if (!by_id_.emplace(e.id, err).second)
            throw ConfigError("duplicate configuration id " + e.id + " in error table");
        if (!by_signature_.emplace(e.assignment, err).second)
            throw ConfigError("duplicate assignment " + join_ids(e.assignment) +
                              " in error table");
    }
}

double TableLookupProvider::error_rate(std::span<const std::string> impl_by_layer) const {
    const std::vector<std::string> key(impl_by_layer.begin(), impl_by_layer.end());
    auto it = by_signature_.find(key);
    if (it == by_signature_.end())
        throw LookupError("no error-table entry for assignment " + join_ids(impl_by_layer));
    return it->second;
}

double TableLookupProvider::by_id(const std::string& config_id) const {
    auto it = by_id_.find(config_id);
    if (it == by_id_.end())
        throw LookupError("no error-table entry for configuration " + config_id);
    return it->second;
}

double table_err(const TableLookupProvider& provider, const std::string& config_id) {
    return provider.by_id(config_id);
}

SimulatedProvider::SimulatedProvider(NetworkSpec net, WeightSet weights,
                                     std::vector<Sample> samples, std::size_t stream_length,
                                     GeneratorSpec gen,
                                     std::map<std::string, NeuronKind> kind_of_impl)
    : net_(std::move(net)),
      weights_(std::move(weights)),
      samples_(std::move(samples)),
      stream_length_(stream_length),
      gen_(gen),
      kind_of_impl_(std::move(kind_of_impl)) {}

double SimulatedProvider::error_rate(std::span<const std::string> impl_by_layer) const {
    const auto ip_layers = net_.inner_product_layers();
    if (impl_by_layer.size() != ip_layers.size())
        throw LookupError("assignment covers " + std::to_string(impl_by_layer.size()) +
                          " layers, network has " + std::to_string(ip_layers.size()));
    KindAssignment assignment;
    for (std::size_t i = 0; i < ip_layers.size(); ++i) {
        auto it = kind_of_impl_.find(impl_by_layer[i]);
        if (it == kind_of_impl_.end())
            throw LookupError("unknown implementation " + impl_by_layer[i] +
                              " in simulated error provider");
        assignment[ip_layers[i]->id] = it->second;
    }
    return estimate_error_rate(net_, weights_, assignment, samples_, stream_length_, gen_);
}

namespace {

std::vector<double> parse_csv_row(const std::string& line, const std::string& context) {
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
        std::size_t comma = line.find(',', pos);
        if (comma == std::string::npos) comma = line.size();
        std::string cell = line.substr(pos, comma - pos);
        const auto first = cell.find_first_not_of(" \t\r");
        if (first == std::string::npos) throw ConfigError(context + ": empty cell");
        const auto last = cell.find_last_not_of(" \t\r");
        cell = cell.substr(first, last - first + 1);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (ec != std::errc() || ptr != cell.data() + cell.size())
            throw ConfigError(context + ": bad number '" + cell + "'");
        row.push_back(v);
        pos = comma + 1;
        if (comma == line.size()) break;
    }
    return row;
}

}  // namespace

WeightMatrix load_weight_csv(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open weight file " + path.string());
    WeightMatrix mat;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        mat.push_back(parse_csv_row(line, path.string() + ":" + std::to_string(lineno)));
        if (mat.back().size() != mat.front().size())
            throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                              ": ragged row width");
    }
    if (mat.empty()) throw ConfigError("weight file " + path.string() + " is empty");
    return mat;
}

std::vector<Sample> load_samples_csv(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open sample file " + path.string());
    std::vector<Sample> samples;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string context = path.string() + ":" + std::to_string(lineno);
        auto row = parse_csv_row(line, context);
        if (row.size() < 2) throw ConfigError(context + ": need label plus features");
        if (row[0] < 0 || row[0] != std::floor(row[0]))
            throw ConfigError(context + ": label must be a nonnegative integer");
        Sample s;
        s.label = static_cast<std::size_t>(row[0]);
        s.input.assign(row.begin() + 1, row.end());
        samples.push_back(std::move(s));
    }
    if (samples.empty()) throw ConfigError("sample file " + path.string() + " is empty");
    return samples;
}

}  // namespace scdnn
