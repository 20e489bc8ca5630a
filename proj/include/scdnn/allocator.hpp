#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scdnn/netsim.hpp"

namespace scdnn {

enum class Metric { Area, Power, Delay, Energy };

inline constexpr std::array<Metric, 4> kAllMetrics = {Metric::Area, Metric::Power, Metric::Delay,
                                                      Metric::Energy};

const char* metric_name(Metric m);
std::optional<Metric> metric_from_name(const std::string& name);

// Layer-scope base units are um^2 / uW / ns / fJ; network-scope figures
// use mm^2 / W / ns / uJ. Conversions are exact powers of ten.
double network_unit_factor(Metric m);
const char* layer_unit_name(Metric m);
const char* network_unit_name(Metric m);

// Per-neuron unit costs for one (layer, implementation) pair.
struct UnitCosts {
    double area = 0.0;    // um^2
    double power = 0.0;   // uW
    double delay = 0.0;   // ns
    double energy = 0.0;  // fJ

    double get(Metric m) const;
};

struct ImplementationSpec {
    std::string id;
    NeuronKind neuron_kind = NeuronKind::Apc;
    std::size_t stream_length = 1024;
    std::map<std::string, UnitCosts> unit_costs;  // layer id -> costs
};

enum class BudgetScope { Layer, Network };

struct Budget {
    Metric metric = Metric::Area;
    double limit = 0.0;  // layer base units (network limits are converted on ingest)
    BudgetScope scope = BudgetScope::Network;
    std::string layer_id;  // meaningful for Layer scope only
};

struct ScoreWeights {
    std::map<Metric, int> omega;

    void validate() const;  // nonnegative, at least one positive
};

struct AllocationSolution {
    // (implementation id, layer id), one pair per inner-product layer,
    // in network layer order.
    std::vector<std::pair<std::string, std::string>> pairs;
    std::map<Metric, double> network_costs;  // layer base units
    double err = 0.0;
    double score = 0.0;

    std::vector<std::string> impl_ids() const;
};

struct OptimizerParams {
    double theta = 0.0;     // inner-loop cost-reduction threshold, units of `target`
    std::size_t tau = 20;   // outer iteration limit
    Metric target = Metric::Area;
};

// c = psi * u.
double layer_cost(std::size_t psi, double unit_cost);

// Sum of layer costs over the solution's pairs, in layer base units.
double network_cost(std::span<const std::pair<std::string, std::string>> pairs, Metric metric,
                    const NetworkSpec& net, std::span<const ImplementationSpec> impls);

// Score = prod_j C_j^omega_j / (1 - err), with C_j in network units.
double score(const std::map<Metric, double>& network_costs_base, const ScoreWeights& weights,
             double err);

// True iff every layer-scoped budget on this layer admits the
// implementation. Network budgets gate whole solutions, not this check.
bool is_valid(const ImplementationSpec& impl, const LayerSpec& layer,
              std::span<const Budget> budgets);

struct MfsResult {
    std::optional<std::vector<std::pair<std::string, std::string>>> pairs;
    std::string blocking_layer;  // set when a layer had no valid implementation
    std::string reason;          // set when infeasible

    bool feasible() const { return pairs.has_value(); }
};

// Algorithm: first valid implementation per layer, in list order. A
// candidate whose lone layer cost already busts a network limit is
// skipped; the finished solution is checked against all network budgets.
MfsResult minimum_feasible_solution(std::span<const ImplementationSpec> impls,
                                    const NetworkSpec& net, std::span<const Budget> budgets);

// minimum_feasible_solution, with one recovery pass per violated network
// budget: rebuild greedily picking the per-layer cheapest valid
// implementation in that metric. Exact for instances with at most one
// network-scoped budget.
MfsResult find_feasible_solution(std::span<const ImplementationSpec> impls,
                                 const NetworkSpec& net, std::span<const Budget> budgets);

struct OptimizeIteration {
    std::size_t iteration = 0;
    std::size_t cost_sweeps = 0;
    double target_cost = 0.0;  // after the cost phase, layer base units
    double score_after = 0.0;  // after the score phase
    double best_score = 0.0;
};

struct OptimizeResult {
    AllocationSolution solution;
    std::vector<OptimizeIteration> trace;
};

// Two-phase refinement: a theta-gated sweep toward the cheapest valid
// implementation in the target metric, then score-guided reallocation;
// the best-scoring feasible solution seen is returned. Terminates when
// an iteration fails to improve the best score or after tau iterations.
OptimizeResult optimize(const MfsResult& mfs, std::span<const ImplementationSpec> impls,
                        const OptimizerParams& params, const ScoreWeights& weights,
                        const ErrProvider& err_provider, std::span<const Budget> budgets,
                        const NetworkSpec& net);

struct SearchResult {
    std::optional<AllocationSolution> solution;

    bool feasible() const { return solution.has_value(); }
};

// Enumerates every assignment (cap-guarded), filters by all budgets,
// returns the minimum-score solution; ties break toward the
// lexicographically first assignment.
SearchResult exhaustive_search(std::span<const ImplementationSpec> impls, const NetworkSpec& net,
                               std::span<const Budget> budgets, const ScoreWeights& weights,
                               const ErrProvider& err_provider,
                               std::uint64_t enumeration_cap = 1000000);

struct CostWarning {
    std::string impl_id;
    std::string layer_id;
    double stated_energy = 0.0;
    double power_delay_product = 0.0;
    double relative_deviation = 0.0;

    std::string message() const;
};

// Flags entries where |energy - power*delay| / energy > 10%. Warnings
// only; ingested tables stay authoritative.
std::vector<CostWarning> validate_cost_table(std::span<const ImplementationSpec> impls);

// Re-evaluates every declared budget against the pairs. Used by tests
// and by optimize to keep refinement feasible.
bool satisfies_all_budgets(std::span<const std::pair<std::string, std::string>> pairs,
                           std::span<const ImplementationSpec> impls, const NetworkSpec& net,
                           std::span<const Budget> budgets);

// Fills in derived costs, err, and score for a pair assignment.
AllocationSolution evaluate_solution(std::span<const std::pair<std::string, std::string>> pairs,
                                     std::span<const ImplementationSpec> impls,
                                     const NetworkSpec& net, const ScoreWeights& weights,
                                     const ErrProvider& err_provider);

}  // namespace scdnn
