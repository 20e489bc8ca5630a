#include "scdnn/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "scdnn/errors.hpp"

namespace scdnn {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& msg) {
    throw ConfigError(origin + ": " + msg);
}

const json& require(const json& j, const char* key, const std::string& origin) {
    auto it = j.find(key);
    if (it == j.end()) fail(origin, std::string("missing key '") + key + "'");
    return *it;
}

LayerKind layer_kind_from(const std::string& s, const std::string& origin) {
    if (s == "inner_product") return LayerKind::InnerProduct;
    if (s == "average_pool") return LayerKind::AveragePool;
    fail(origin, "unknown layer kind '" + s + "' (use inner_product or average_pool)");
}

NeuronKind neuron_kind_from(const std::string& s, const std::string& origin) {
    if (s == "APC" || s == "apc") return NeuronKind::Apc;
    if (s == "MUX" || s == "mux") return NeuronKind::Mux;
    fail(origin, "unknown neuron kind '" + s + "' (use APC or MUX)");
}

Metric metric_from(const std::string& s, const std::string& origin) {
    auto m = metric_from_name(s);
    if (!m) fail(origin, "unknown metric '" + s + "'");
    return *m;
}

NetworkSpec parse_network(const json& j, const std::string& origin) {
    if (!j.is_array() || j.empty()) fail(origin, "'network' must be a nonempty array of layers");
    NetworkSpec net;
    for (const auto& lj : j) {
        LayerSpec l;
        l.id = require(lj, "id", origin).get<std::string>();
        l.kind = layer_kind_from(require(lj, "kind", origin).get<std::string>(), origin);
        l.neuron_count = require(lj, "psi", origin).get<std::size_t>();
        l.fan_in = require(lj, "fan_in", origin).get<std::size_t>();
        if (l.neuron_count == 0) fail(origin, "layer " + l.id + " needs psi >= 1");
        if (net.find_layer(l.id) != nullptr) fail(origin, "duplicate layer id " + l.id);
        net.layers.push_back(std::move(l));
    }
    return net;
}

std::vector<ImplementationSpec> parse_implementations(const json& j, const NetworkSpec& net,
                                                      const std::string& origin) {
    if (!j.is_array() || j.empty())
        fail(origin, "'implementations' must be a nonempty array");
    std::vector<ImplementationSpec> impls;
    for (const auto& ij : j) {
        ImplementationSpec impl;
        impl.id = require(ij, "id", origin).get<std::string>();
        impl.neuron_kind =
            neuron_kind_from(require(ij, "neuron_kind", origin).get<std::string>(), origin);
        impl.stream_length = require(ij, "stream_length", origin).get<std::size_t>();
        if (impl.stream_length == 0) fail(origin, impl.id + " needs stream_length >= 1");
        const json& costs = require(ij, "costs", origin);
        for (auto it = costs.begin(); it != costs.end(); ++it) {
            const std::string layer_id = it.key();
            if (net.find_layer(layer_id) == nullptr)
                fail(origin, impl.id + " lists costs for unknown layer " + layer_id);
            UnitCosts u;
            u.area = require(*it, "area", origin).get<double>();
            u.power = require(*it, "power", origin).get<double>();
            u.delay = require(*it, "delay", origin).get<double>();
            u.energy = require(*it, "energy", origin).get<double>();
            for (Metric m : kAllMetrics)
                if (u.get(m) < 0)
                    fail(origin, impl.id + "/" + layer_id + " has a negative " + metric_name(m) +
                                     " cost");
            impl.unit_costs.emplace(layer_id, u);
        }
        // Every inner-product layer must be costed for every implementation.
        for (const auto* l : net.inner_product_layers())
            if (!impl.unit_costs.contains(l->id))
                fail(origin, impl.id + " is missing costs for layer " + l->id);
        for (const auto& other : impls)
            if (other.id == impl.id) fail(origin, "duplicate implementation id " + impl.id);
        impls.push_back(std::move(impl));
    }
    return impls;
}

std::vector<Budget> parse_budgets(const json& j, const NetworkSpec& net,
                                  const std::string& origin) {
    std::vector<Budget> budgets;
    if (j.is_null()) return budgets;
    if (!j.is_array()) fail(origin, "'budgets' must be an array");
    for (const auto& bj : j) {
        Budget b;
        b.metric = metric_from(require(bj, "metric", origin).get<std::string>(), origin);
        const double limit = require(bj, "limit", origin).get<double>();
        if (!(limit > 0)) fail(origin, "budget limits must be positive");
        const std::string scope = require(bj, "scope", origin).get<std::string>();
        if (scope == "network") {
            b.scope = BudgetScope::Network;
            // Network limits arrive in mm^2 / W / uJ / ns; store base units.
            b.limit = limit / network_unit_factor(b.metric);
        } else if (scope == "layer") {
            b.scope = BudgetScope::Layer;
            b.limit = limit;
            b.layer_id = require(bj, "layer", origin).get<std::string>();
            if (net.find_layer(b.layer_id) == nullptr)
                fail(origin, "budget names unknown layer " + b.layer_id);
        } else {
            fail(origin, "budget scope must be 'layer' or 'network'");
        }
        budgets.push_back(std::move(b));
    }
    return budgets;
}

ScoreWeights parse_weights(const json& j, const std::string& origin) {
    if (!j.is_object()) fail(origin, "'score_weights' must be an object");
    ScoreWeights w;
    for (auto it = j.begin(); it != j.end(); ++it)
        w.omega[metric_from(it.key(), origin)] = it->get<int>();
    try {
        w.validate();
    } catch (const std::invalid_argument& e) {
        fail(origin, e.what());
    }
    return w;
}

std::vector<ErrorTableEntry> parse_error_table(const json& j, const std::string& origin) {
    std::vector<ErrorTableEntry> entries;
    if (j.is_null()) return entries;
    if (!j.is_array()) fail(origin, "'error_table' must be an array");
    for (const auto& ej : j) {
        ErrorTableEntry e;
        e.id = require(ej, "id", origin).get<std::string>();
        e.error_percent = require(ej, "error_percent", origin).get<double>();
        if (auto it = ej.find("assignment"); it != ej.end())
            e.assignment = it->get<std::vector<std::string>>();
        entries.push_back(std::move(e));
    }
    return entries;
}

}  // namespace

TableLookupProvider ProblemConfig::make_table_provider() const {
    if (error_table.empty())
        throw ConfigError("configuration has no error_table; cannot build a lookup provider");
    return TableLookupProvider(error_table, network.inner_product_layers().size());
}

ProblemConfig parse_config_text(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(origin, std::string("not valid JSON: ") + e.what());
    }
    ProblemConfig cfg;
    cfg.network = parse_network(require(j, "network", origin), origin);
    cfg.implementations =
        parse_implementations(require(j, "implementations", origin), cfg.network, origin);
    cfg.budgets = parse_budgets(j.value("budgets", json()), cfg.network, origin);
    cfg.score_weights = parse_weights(require(j, "score_weights", origin), origin);
    cfg.error_table = parse_error_table(j.value("error_table", json()), origin);
    if (!cfg.error_table.empty()) {
        // Construct once so malformed tables fail at load time.
        TableLookupProvider check(cfg.error_table, cfg.network.inner_product_layers().size());
        (void)check;
    }
    return cfg;
}

ProblemConfig load_config(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open configuration file " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str(), path.string());
}

std::string solution_report(const AllocationSolution& solution, const ProblemConfig& config,
                            bool feasible) {
    std::string out;
    char line[256];
    out += "solution:\n";
    for (const auto& [impl, layer] : solution.pairs) {
        std::snprintf(line, sizeof(line), "  layer %s <- %s\n", layer.c_str(), impl.c_str());
        out += line;
    }
    out += "network costs:\n";
    for (Metric m : kAllMetrics) {
        auto it = solution.network_costs.find(m);
        if (it == solution.network_costs.end()) continue;
        std::snprintf(line, sizeof(line), "  %s: %.9g %s\n", metric_name(m),
                      it->second * network_unit_factor(m), network_unit_name(m));
        out += line;
    }
    std::snprintf(line, sizeof(line), "err: %.9g\n", solution.err);
    out += line;
    std::snprintf(line, sizeof(line), "score: %.9g\n", solution.score);
    out += line;
    out += "score weights:";
    for (const auto& [m, w] : config.score_weights.omega) {
        std::snprintf(line, sizeof(line), " %s=%d", metric_name(m), w);
        out += line;
    }
    out += "\n";
    out += "budgets:\n";
    if (config.budgets.empty()) out += "  (none)\n";
    for (const auto& b : config.budgets) {
        if (b.scope == BudgetScope::Network) {
            std::snprintf(line, sizeof(line), "  network %s <= %.9g %s\n", metric_name(b.metric),
                          b.limit * network_unit_factor(b.metric), network_unit_name(b.metric));
        } else {
            std::snprintf(line, sizeof(line), "  layer %s %s <= %.9g %s\n", b.layer_id.c_str(),
                          metric_name(b.metric), b.limit, layer_unit_name(b.metric));
        }
        out += line;
    }
    out += feasible ? "feasible: yes\n" : "feasible: no\n";
    return out;
}

}  // namespace scdnn
