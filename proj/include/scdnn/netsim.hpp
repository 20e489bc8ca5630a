#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scdnn/neuron.hpp"

namespace scdnn {

enum class LayerKind { InnerProduct, AveragePool };

struct LayerSpec {
    std::string id;
    LayerKind kind = LayerKind::InnerProduct;
    std::size_t neuron_count = 1;  // psi
    std::size_t fan_in = 1;        // n for InnerProduct, window k for AveragePool
};

struct NetworkSpec {
    std::vector<LayerSpec> layers;

    // Checks psi/fan_in bounds and adjacent-layer dimensional consistency
    // against the given primary input width.
    void validate(std::size_t input_dim) const;
    std::vector<const LayerSpec*> inner_product_layers() const;
    const LayerSpec* find_layer(const std::string& id) const;
};

// row = neuron, column = input
using WeightMatrix = std::vector<std::vector<double>>;

struct WeightSet {
    std::map<std::string, WeightMatrix> by_layer;  // InnerProduct layer id -> psi x n

    void validate(const NetworkSpec& net) const;
};

// layer id -> neuron kind, for every InnerProduct layer
using KindAssignment = std::map<std::string, NeuronKind>;

struct Sample {
    std::vector<double> input;  // values in [-1, 1]
    std::size_t label = 0;
};

// Reference forward pass: tanh(W x) per inner-product layer, arithmetic
// mean per pooling layer; returns argmax (ties toward the lowest index).
std::size_t float_forward(const NetworkSpec& net, const WeightSet& weights,
                          std::span<const double> input);

// Final-layer activations of the reference pass (for margin filtering).
std::vector<double> float_forward_outputs(const NetworkSpec& net, const WeightSet& weights,
                                          std::span<const double> input);

// SC forward pass: inputs and weights become bipolar streams, every layer
// consumes and produces streams, decoding happens only at the output.
std::size_t sc_forward(const NetworkSpec& net, const WeightSet& weights,
                       const KindAssignment& assignment, std::span<const double> input,
                       std::size_t stream_length, const GeneratorSpec& gen);

// Fraction of samples misclassified by sc_forward.
double estimate_error_rate(const NetworkSpec& net, const WeightSet& weights,
                           const KindAssignment& assignment, std::span<const Sample> samples,
                           std::size_t stream_length, const GeneratorSpec& gen);

// ---------------------------------------------------------------------------
// Error-rate providers for the allocator: the optimizer only ever sees
// Err through this interface.

struct ErrorTableEntry {
    std::string id;
    double error_percent = 0.0;  // in [0, 100)
    // Implementation ids per layer; empty means uniform: every layer uses
    // the implementation named by `id`.
    std::vector<std::string> assignment;
};

class ErrProvider {
  public:
    virtual ~ErrProvider() = default;
    // impl_by_layer: implementation ids in network layer order.
    virtual double error_rate(std::span<const std::string> impl_by_layer) const = 0;
};

class TableLookupProvider final : public ErrProvider {
  public:
    TableLookupProvider(std::vector<ErrorTableEntry> entries, std::size_t layer_count);

    double error_rate(std::span<const std::string> impl_by_layer) const override;
    double by_id(const std::string& config_id) const;

  private:
    std::vector<ErrorTableEntry> entries_;
    std::map<std::string, double> by_id_;
    std::map<std::vector<std::string>, double> by_signature_;
};

double table_err(const TableLookupProvider& provider, const std::string& config_id);

// Runs the SC simulator with the solution's per-layer neuron kinds.
class SimulatedProvider final : public ErrProvider {
  public:
    SimulatedProvider(NetworkSpec net, WeightSet weights, std::vector<Sample> samples,
                      std::size_t stream_length, GeneratorSpec gen,
                      std::map<std::string, NeuronKind> kind_of_impl);

    double error_rate(std::span<const std::string> impl_by_layer) const override;

  private:
    NetworkSpec net_;
    WeightSet weights_;
    std::vector<Sample> samples_;
    std::size_t stream_length_;
    GeneratorSpec gen_;
    std::map<std::string, NeuronKind> kind_of_impl_;
};

WeightMatrix load_weight_csv(const std::filesystem::path& path);
std::vector<Sample> load_samples_csv(const std::filesystem::path& path);

}  // namespace scdnn
