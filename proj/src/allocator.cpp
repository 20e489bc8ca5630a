#include "scdnn/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "scdnn/errors.hpp"
#include "scdnn/rng.hpp"

namespace scdnn {

const char* metric_name(Metric m) {
    switch (m) {
        case Metric::Area: return "area";
        case Metric::Power: return "power";
        case Metric::Delay: return "delay";
        case Metric::Energy: return "energy";
    }
    return "?";
}

std::optional<Metric> metric_from_name(const std::string& name) {
    for (Metric m : kAllMetrics)
        if (name == metric_name(m)) return m;
    return std::nullopt;
}

double network_unit_factor(Metric m) {
    switch (m) {
        case Metric::Area: return 1e-6;    // um^2 -> mm^2
        case Metric::Power: return 1e-6;   // uW -> W
        case Metric::Delay: return 1.0;    // ns -> ns
        case Metric::Energy: return 1e-9;  // fJ -> uJ
    }
    return 1.0;
}

const char* layer_unit_name(Metric m) {
    switch (m) {
        case Metric::Area: return "um^2";
        case Metric::Power: return "uW";
        case Metric::Delay: return "ns";
        case Metric::Energy: return "fJ";
    }
    return "?";
}

const char* network_unit_name(Metric m) {
    switch (m) {
        case Metric::Area: return "mm^2";
        case Metric::Power: return "W";
        case Metric::Delay: return "ns";
        case Metric::Energy: return "uJ";
    }
    return "?";
}

double UnitCosts::get(Metric m) const {
    switch (m) {
        case Metric::Area: return area;
        case Metric::Power: return power;
        case Metric::Delay: return delay;
        case Metric::Energy: return energy;
    }
    return 0.0;
}

void ScoreWeights::validate() const {
    bool any = false;
    for (const auto& [m, w] : omega) {
        if (w < 0)
            throw std::invalid_argument(std::string("score weight for ") + metric_name(m) +
                                        " must be nonnegative");
        any = any || w > 0;
    }
    if (!any) throw std::invalid_argument("at least one score weight must be positive");
}

std::vector<std::string> AllocationSolution::impl_ids() const {
    std::vector<std::string> ids;
    ids.reserve(pairs.size());
    for (const auto& [impl, layer] : pairs) ids.push_back(impl);
    return ids;
}

double layer_cost(std::size_t psi, double unit_cost) {
    if (psi == 0) throw std::invalid_argument("layer_cost requires psi >= 1");
    if (unit_cost < 0) throw std::invalid_argument("layer_cost requires a nonnegative unit cost");
    return static_cast<double>(psi) * unit_cost;
}

namespace {

const ImplementationSpec* find_impl(std::span<const ImplementationSpec> impls,
                                    const std::string& id) {
    for (const auto& i : impls)
        if (i.id == id) return &i;
    return nullptr;
}

double unit_cost_or_throw(const ImplementationSpec& impl, const std::string& layer_id,
                          Metric metric) {
    auto it = impl.unit_costs.find(layer_id);
    if (it == impl.unit_costs.end())
        throw DataError("no unit costs for layer " + layer_id + ", implementation " + impl.id +
                        ", metric " + metric_name(metric));
    return it->second.get(metric);
}

double layer_cost_of(const ImplementationSpec& impl, const LayerSpec& layer, Metric metric) {
    return layer_cost(layer.neuron_count, unit_cost_or_throw(impl, layer.id, metric));
}

// Layer-budget validity plus the network prefilter: a lone layer cost
// that already exceeds a network limit can never be part of a feasible
// solution.
bool candidate_admissible(const ImplementationSpec& impl, const LayerSpec& layer,
                          std::span<const Budget> budgets) {
    if (!is_valid(impl, layer, budgets)) return false;
    for (const auto& b : budgets) {
        if (b.scope != BudgetScope::Network) continue;
        if (layer_cost_of(impl, layer, b.metric) > b.limit) return false;
    }
    return true;
}

}  // namespace

double network_cost(std::span<const std::pair<std::string, std::string>> pairs, Metric metric,
                    const NetworkSpec& net, std::span<const ImplementationSpec> impls) {
    double total = 0.0;
    for (const auto& [impl_id, layer_id] : pairs) {
        const ImplementationSpec* impl = find_impl(impls, impl_id);
        if (impl == nullptr) throw DataError("unknown implementation " + impl_id);
        const LayerSpec* layer = net.find_layer(layer_id);
        if (layer == nullptr) throw DataError("unknown layer " + layer_id);
        total += layer_cost_of(*impl, *layer, metric);
    }
    return total;
}

double score(const std::map<Metric, double>& network_costs_base, const ScoreWeights& weights,
             double err) {
    weights.validate();
    if (!(err >= 0.0 && err < 1.0))
        throw std::domain_error("error rate must lie in [0, 1), got " + std::to_string(err));
    double product = 1.0;
    for (const auto& [metric, w] : weights.omega) {
        if (w == 0) continue;
        auto it = network_costs_base.find(metric);
        if (it == network_costs_base.end())
            throw DataError(std::string("no network cost available for metric ") +
                            metric_name(metric));
        const double c = it->second * network_unit_factor(metric);
        product *= std::pow(c, w);
    }
    return product / (1.0 - err);
}

bool is_valid(const ImplementationSpec& impl, const LayerSpec& layer,
              std::span<const Budget> budgets) {
    for (const auto& b : budgets) {
        if (b.scope != BudgetScope::Layer || b.layer_id != layer.id) continue;
        if (layer_cost_of(impl, layer, b.metric) > b.limit) return false;
    }
    return true;
}

MfsResult minimum_feasible_solution(std::span<const ImplementationSpec> impls,
                                    const NetworkSpec& net, std::span<const Budget> budgets) {
    if (impls.empty()) throw std::invalid_argument("need at least one implementation");
    const auto layers = net.inner_product_layers();
    if (layers.empty()) throw std::invalid_argument("network has no inner-product layers");

    MfsResult result;
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto* layer : layers) {
        const ImplementationSpec* chosen = nullptr;
        for (const auto& impl : impls) {
            if (candidate_admissible(impl, *layer, budgets)) {
                chosen = &impl;
                break;
            }
        }
        if (chosen == nullptr) {
            result.blocking_layer = layer->id;
            result.reason = "no valid implementation for layer " + layer->id;
            return result;
        }
        pairs.emplace_back(chosen->id, layer->id);
    }
    for (const auto& b : budgets) {
        if (b.scope != BudgetScope::Network) continue;
        const double total = network_cost(pairs, b.metric, net, impls);
        if (total > b.limit) {
            result.reason = std::string("network ") + metric_name(b.metric) + " budget violated: " +
                            std::to_string(total) + " > " + std::to_string(b.limit) + " " +
                            layer_unit_name(b.metric);
            return result;
        }
    }
    result.pairs = std::move(pairs);
    return result;
}

MfsResult find_feasible_solution(std::span<const ImplementationSpec> impls,
                                 const NetworkSpec& net, std::span<const Budget> budgets) {
    MfsResult first = minimum_feasible_solution(impls, net, budgets);
    if (first.feasible() || !first.blocking_layer.empty()) return first;

    // First-fit busted a network budget. Rebuild greedily, cheapest per
    // layer in each network-budgeted metric; additive costs make this
    // exact when a single network budget is declared.
    const auto layers = net.inner_product_layers();
    for (const auto& b : budgets) {
        if (b.scope != BudgetScope::Network) continue;
        std::vector<std::pair<std::string, std::string>> pairs;
        bool complete = true;
        for (const auto* layer : layers) {
            const ImplementationSpec* cheapest = nullptr;
            double best_cost = 0.0;
            for (const auto& impl : impls) {
                if (!candidate_admissible(impl, *layer, budgets)) continue;
                const double c = layer_cost_of(impl, *layer, b.metric);
                if (cheapest == nullptr || c < best_cost) {
                    cheapest = &impl;
                    best_cost = c;
                }
            }
            if (cheapest == nullptr) {
                complete = false;
                break;
            }
            pairs.emplace_back(cheapest->id, layer->id);
        }
        if (complete && satisfies_all_budgets(pairs, impls, net, budgets)) {
            MfsResult ok;
            ok.pairs = std::move(pairs);
            return ok;
        }
    }
    return first;
}

bool satisfies_all_budgets(std::span<const std::pair<std::string, std::string>> pairs,
                           std::span<const ImplementationSpec> impls, const NetworkSpec& net,
                           std::span<const Budget> budgets) {
    for (const auto& [impl_id, layer_id] : pairs) {
        const ImplementationSpec* impl = find_impl(impls, impl_id);
        const LayerSpec* layer = net.find_layer(layer_id);
        if (impl == nullptr || layer == nullptr) return false;
        if (!is_valid(*impl, *layer, budgets)) return false;
    }
    for (const auto& b : budgets) {
        if (b.scope != BudgetScope::Network) continue;
        if (network_cost(pairs, b.metric, net, impls) > b.limit) return false;
    }
    return true;
}

AllocationSolution evaluate_solution(std::span<const std::pair<std::string, std::string>> pairs,
                                     std::span<const ImplementationSpec> impls,
                                     const NetworkSpec& net, const ScoreWeights& weights,
                                     const ErrProvider& err_provider) {
    AllocationSolution s;
    s.pairs.assign(pairs.begin(), pairs.end());
    for (Metric m : kAllMetrics) s.network_costs[m] = network_cost(pairs, m, net, impls);
    std::vector<std::string> ids;
    ids.reserve(pairs.size());
    for (const auto& [impl, layer] : pairs) ids.push_back(impl);
    s.err = err_provider.error_rate(ids);
    s.score = score(s.network_costs, weights, s.err);
    return s;
}

namespace {

// Memoizes provider calls and score math per assignment; the simulated
// provider makes score evaluation expensive.
class ScoreCache {
  public:
    ScoreCache(std::span<const ImplementationSpec> impls, const NetworkSpec& net,
               const ScoreWeights& weights, const ErrProvider& provider)
        : impls_(impls), net_(net), weights_(weights), provider_(provider) {}

    const AllocationSolution& eval(const std::vector<std::pair<std::string, std::string>>& pairs) {
        std::vector<std::string> key;
        key.reserve(pairs.size());
        for (const auto& [impl, layer] : pairs) key.push_back(impl);
        auto it = cache_.find(key);
        if (it == cache_.end())
            it = cache_.emplace(key, evaluate_solution(pairs, impls_, net_, weights_, provider_))
                     .first;
        return it->second;
    }

  private:
    std::span<const ImplementationSpec> impls_;
    const NetworkSpec& net_;
    const ScoreWeights& weights_;
    const ErrProvider& provider_;
    std::map<std::vector<std::string>, AllocationSolution> cache_;
};

using PairVec = std::vector<std::pair<std::string, std::string>>;

// One theta-gated refinement phase: sweep all layers toward the cheapest
// admissible implementation in the target metric until the per-sweep
// reduction drops to theta.
std::size_t cost_refinement(PairVec& current, std::span<const ImplementationSpec> impls,
                            const std::vector<const LayerSpec*>& layers,
                            std::span<const Budget> budgets, Metric target, double theta) {
    std::size_t sweeps = 0;
    double reduction;
    do {
        reduction = 0.0;
        ++sweeps;
        for (std::size_t li = 0; li < layers.size(); ++li) {
            const ImplementationSpec* incumbent = find_impl(impls, current[li].first);
            double incumbent_cost = layer_cost_of(*incumbent, *layers[li], target);
            const ImplementationSpec* cheapest = incumbent;
            double cheapest_cost = incumbent_cost;
            for (const auto& impl : impls) {
                if (!candidate_admissible(impl, *layers[li], budgets)) continue;
                const double c = layer_cost_of(impl, *layers[li], target);
                if (c < cheapest_cost) {
                    cheapest = &impl;
                    cheapest_cost = c;
                }
            }
            if (cheapest != incumbent) {
                current[li].first = cheapest->id;
                reduction += incumbent_cost - cheapest_cost;
            }
        }
    } while (reduction > theta && sweeps < 1000);
    return sweeps;
}

// Coordinate descent on the score: per layer, adopt the best-scoring
// feasible single replacement; repeat until a full sweep changes nothing.
void score_descent(PairVec& current, ScoreCache& cache,
                   std::span<const ImplementationSpec> impls,
                   const std::vector<const LayerSpec*>& layers, std::span<const Budget> budgets,
                   const NetworkSpec& net) {
    bool improved = true;
    std::size_t guard = 0;
    while (improved && guard++ < 200) {
        improved = false;
        for (std::size_t li = 0; li < layers.size(); ++li) {
            double here = cache.eval(current).score;
            PairVec best = current;
            double best_score = here;
            for (const auto& impl : impls) {
                if (impl.id == current[li].first) continue;
                if (!candidate_admissible(impl, *layers[li], budgets)) continue;
                PairVec trial = current;
                trial[li].first = impl.id;
                if (!satisfies_all_budgets(trial, impls, net, budgets)) continue;
                const double sc = cache.eval(trial).score;
                if (sc < best_score) {
                    best_score = sc;
                    best = std::move(trial);
                }
            }
            if (best_score < here) {
                current = std::move(best);
                improved = true;
            }
        }
    }
}

// Deterministic start basket: per-metric cheapest assignments plus a few
// seeded random feasible assignments.
std::vector<PairVec> restart_basket(std::span<const ImplementationSpec> impls,
                                    const std::vector<const LayerSpec*>& layers,
                                    std::span<const Budget> budgets, const NetworkSpec& net,
                                    std::size_t iteration) {
    std::vector<PairVec> starts;
    for (Metric m : kAllMetrics) {
        PairVec pairs;
        bool complete = true;
        for (const auto* layer : layers) {
            const ImplementationSpec* cheapest = nullptr;
            double best_cost = 0.0;
            for (const auto& impl : impls) {
                if (!candidate_admissible(impl, *layer, budgets)) continue;
                const double c = layer_cost_of(impl, *layer, m);
                if (cheapest == nullptr || c < best_cost) {
                    cheapest = &impl;
                    best_cost = c;
                }
            }
            if (cheapest == nullptr) {
                complete = false;
                break;
            }
            pairs.emplace_back(cheapest->id, layer->id);
        }
        if (complete && satisfies_all_budgets(pairs, impls, net, budgets))
            starts.push_back(std::move(pairs));
    }

    SplitMix64 rng(substream_id({0x7265737461727473ull, iteration}));
    const std::size_t random_starts = 6;
    for (std::size_t r = 0; r < random_starts; ++r) {
        PairVec pairs;
        for (const auto* layer : layers) {
            std::vector<const ImplementationSpec*> admissible;
            for (const auto& impl : impls)
                if (candidate_admissible(impl, *layer, budgets)) admissible.push_back(&impl);
            if (admissible.empty()) break;
            const auto pick = rng.next_below(static_cast<std::uint32_t>(admissible.size()));
            pairs.emplace_back(admissible[pick]->id, layer->id);
        }
        if (pairs.size() == layers.size() && satisfies_all_budgets(pairs, impls, net, budgets))
            starts.push_back(std::move(pairs));
    }
    return starts;
}

}  // namespace

OptimizeResult optimize(const MfsResult& mfs, std::span<const ImplementationSpec> impls,
                        const OptimizerParams& params, const ScoreWeights& weights,
                        const ErrProvider& err_provider, std::span<const Budget> budgets,
                        const NetworkSpec& net) {
    if (!mfs.feasible()) throw std::invalid_argument("optimize requires a feasible solution");
    if (params.tau == 0) throw std::invalid_argument("iteration limit tau must be >= 1");
    weights.validate();

    const auto layers = net.inner_product_layers();
    ScoreCache cache(impls, net, weights, err_provider);

    PairVec current = *mfs.pairs;
    AllocationSolution best = cache.eval(current);

    OptimizeResult result;
    for (std::size_t iter = 1; iter <= params.tau; ++iter) {
        const double best_before = best.score;
        OptimizeIteration record;
        record.iteration = iter;

        record.cost_sweeps =
            cost_refinement(current, impls, layers, budgets, params.target, params.theta);
        record.target_cost = network_cost(current, params.target, net, impls);
        if (satisfies_all_budgets(current, impls, net, budgets)) {
            const auto& sol = cache.eval(current);
            if (sol.score < best.score) best = sol;
        } else {
            // The cheapest-in-target sweep can overrun another metric's
            // network budget; restart the score phase from the incumbent.
            current = best.pairs;
        }

        score_descent(current, cache, impls, layers, budgets, net);
        {
            const auto& sol = cache.eval(current);
            record.score_after = sol.score;
            if (sol.score < best.score) best = sol;
        }

        for (auto& start : restart_basket(impls, layers, budgets, net, iter)) {
            score_descent(start, cache, impls, layers, budgets, net);
            const auto& sol = cache.eval(start);
            if (sol.score < best.score) best = sol;
        }

        current = best.pairs;
        record.best_score = best.score;
        result.trace.push_back(record);
        if (!(best.score < best_before)) break;  // no improvement this iteration
    }

    result.solution = best;
    return result;
}

SearchResult exhaustive_search(std::span<const ImplementationSpec> impls, const NetworkSpec& net,
                               std::span<const Budget> budgets, const ScoreWeights& weights,
                               const ErrProvider& err_provider, std::uint64_t enumeration_cap) {
    if (impls.empty()) throw std::invalid_argument("need at least one implementation");
    const auto layers = net.inner_product_layers();
    if (layers.empty()) throw std::invalid_argument("network has no inner-product layers");
    weights.validate();

    const auto count = static_cast<std::uint64_t>(impls.size());
    std::uint64_t required = 1;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (required > std::numeric_limits<std::uint64_t>::max() / count) {
            required = std::numeric_limits<std::uint64_t>::max();
            break;
        }
        required *= count;
    }
    if (required > enumeration_cap)
        throw CapExceededError("exhaustive search needs " + std::to_string(required) +
                                   " evaluations, cap is " + std::to_string(enumeration_cap),
                               required);

    SearchResult result;
    std::vector<std::size_t> idx(layers.size(), 0);
    for (bool done = false; !done;) {
        PairVec pairs;
        pairs.reserve(layers.size());
        for (std::size_t li = 0; li < layers.size(); ++li)
            pairs.emplace_back(impls[idx[li]].id, layers[li]->id);
        if (satisfies_all_budgets(pairs, impls, net, budgets)) {
            AllocationSolution sol = evaluate_solution(pairs, impls, net, weights, err_provider);
            // Strict comparison keeps the lexicographically first assignment on ties.
            if (!result.solution || sol.score < result.solution->score)
                result.solution = std::move(sol);
        }
        // Odometer with the last layer least significant: lexicographic order.
        done = true;
        for (std::size_t pos = layers.size(); pos-- > 0;) {
            if (++idx[pos] < impls.size()) {
                done = false;
                break;
            }
            idx[pos] = 0;
        }
    }
    return result;
}

std::string CostWarning::message() const {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "implementation %s, layer %s: stated energy %.6g fJ but power*delay = %.6g fJ "
                  "(%.1f%% deviation)",
                  impl_id.c_str(), layer_id.c_str(), stated_energy, power_delay_product,
                  relative_deviation * 100.0);
    return buf;
}

std::vector<CostWarning> validate_cost_table(std::span<const ImplementationSpec> impls) {
    std::vector<CostWarning> warnings;
    for (const auto& impl : impls) {
        for (const auto& [layer_id, costs] : impl.unit_costs) {
            const double pd = costs.power * costs.delay;
            double dev;
            if (costs.energy > 0.0)
                dev = std::abs(costs.energy - pd) / costs.energy;
            else
                dev = pd == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
            if (dev > 0.10)
                warnings.push_back({impl.id, layer_id, costs.energy, pd, dev});
        }
    }
    return warnings;
}

}  // namespace scdnn
