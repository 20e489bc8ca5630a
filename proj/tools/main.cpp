// scdnn: bit-level stochastic-computing neural-network simulator and
// budget-driven design allocator. Subcommands wire the library modules
// to files and flags; every run prints its full resolved parameter set
// so outputs are self-describing.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scdnn/allocator.hpp"
#include "scdnn/config.hpp"
#include "scdnn/errors.hpp"
#include "scdnn/netsim.hpp"
#include "scdnn/profiler.hpp"

namespace {

using namespace scdnn;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitCap = 4;

NeuronKind parse_impl_flag(const std::string& s) {
    if (s == "apc" || s == "APC") return NeuronKind::Apc;
    if (s == "mux" || s == "MUX") return NeuronKind::Mux;
    throw ConfigError("--impl must be apc or mux, got '" + s + "'");
}

Metric parse_metric_flag(const std::string& s) {
    auto m = metric_from_name(s);
    if (!m) throw ConfigError("--target must be area, power, delay, or energy, got '" + s + "'");
    return *m;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t comma = s.find(',', pos);
        if (comma == std::string::npos) comma = s.size();
        out.push_back(s.substr(pos, comma - pos));
        pos = comma + 1;
        if (comma == s.size()) break;
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open " + path + " for writing");
    f << text;
    if (!f.flush()) throw ConfigError("failed writing " + path);
}

struct CharacterizeArgs {
    std::string impl;
    std::vector<std::size_t> fan_ins;
    std::vector<std::size_t> stream_lengths;
    std::size_t trials = 1000;
    std::uint64_t seed = 0;
    std::string out;
    unsigned threads = 0;
};

int run_characterize(const CharacterizeArgs& a) {
    if (a.trials == 0) throw ConfigError("--trials must be >= 1");
    TrialPlan plan;
    plan.impl = parse_impl_flag(a.impl);
    plan.fan_ins = a.fan_ins;
    plan.stream_lengths = a.stream_lengths;
    plan.trials = a.trials;
    plan.seed = a.seed;

    std::printf("characterize: impl=%s trials=%zu seed=%llu threads=%u\n",
                neuron_kind_name(plan.impl), plan.trials,
                static_cast<unsigned long long>(plan.seed), a.threads);
    const auto profiles = sweep(plan, a.threads);
    for (const auto& p : profiles)
        std::printf("  n=%zu m=%zu abs_error=%.6f mean_error=%+.6f\n", p.fan_in, p.stream_length,
                    p.absolute_error, p.mean_error);
    export_profiles(profiles, a.out);
    std::printf("wrote %s (%zu rows)\n", a.out.c_str(), profiles.size());
    return kExitOk;
}

struct CalibrateArgs {
    std::size_t fan_in = 16;
    std::size_t stream_length = 8192;
    std::vector<unsigned> candidates{8, 16, 32, 64, 128};
    std::vector<double> z_grid{-2, -1, 0, 1, 2};
    std::size_t trials = 50;
    std::uint64_t seed = 1;
};

int run_calibrate(const CalibrateArgs& a) {
    std::printf("calibrate: n=%zu m=%zu trials=%zu seed=%llu\n", a.fan_in, a.stream_length,
                a.trials, static_cast<unsigned long long>(a.seed));
    const auto devs = btanh_calibration_deviations(a.fan_in, a.stream_length, a.candidates,
                                                   a.z_grid, a.trials, a.seed);
    for (std::size_t i = 0; i < a.candidates.size(); ++i)
        std::printf("  S=%u max_deviation=%.6f\n", a.candidates[i], devs[i]);
    const unsigned chosen = calibrate_btanh_states(a.fan_in, a.stream_length, a.candidates,
                                                   a.z_grid, a.trials, a.seed);
    std::printf("chosen S=%u\n", chosen);
    return kExitOk;
}

struct ProviderArgs {
    std::string weights;  // comma list of CSV paths, inner-product layer order
    std::string samples;
    std::size_t stream_length = 1024;
    std::uint64_t seed = 0;
};

WeightSet load_weight_set(const ProblemConfig& cfg, const std::string& weight_list) {
    const auto paths = split_list(weight_list);
    const auto ip = cfg.network.inner_product_layers();
    if (paths.size() != ip.size())
        throw ConfigError("--weights lists " + std::to_string(paths.size()) +
                          " files but the network has " + std::to_string(ip.size()) +
                          " inner-product layers");
    WeightSet ws;
    for (std::size_t i = 0; i < ip.size(); ++i) ws.by_layer[ip[i]->id] = load_weight_csv(paths[i]);
    return ws;
}

// Builds the error provider: simulated when weights/samples are given,
// table lookup otherwise.
std::unique_ptr<ErrProvider> make_provider(const ProblemConfig& cfg, const ProviderArgs& p,
                                           std::optional<TableLookupProvider>& table_slot) {
    if (!p.weights.empty() || !p.samples.empty()) {
        if (p.weights.empty() || p.samples.empty())
            throw ConfigError("simulated error provider needs both --weights and --samples");
        WeightSet ws = load_weight_set(cfg, p.weights);
        auto samples = load_samples_csv(p.samples);
        std::map<std::string, NeuronKind> kinds;
        for (const auto& impl : cfg.implementations) kinds[impl.id] = impl.neuron_kind;
        GeneratorSpec gen{GeneratorMethod::Bernoulli, p.seed, 16};
        return std::make_unique<SimulatedProvider>(cfg.network, std::move(ws), std::move(samples),
                                                   p.stream_length, gen, std::move(kinds));
    }
    table_slot.emplace(cfg.make_table_provider());
    // Non-owning view; the optional outlives the unique_ptr use sites.
    struct Ref final : ErrProvider {
        const TableLookupProvider* t;
        explicit Ref(const TableLookupProvider* p) : t(p) {}
        double error_rate(std::span<const std::string> ids) const override {
            return t->error_rate(ids);
        }
    };
    return std::make_unique<Ref>(&*table_slot);
}

struct AllocateArgs {
    std::string config;
    std::string target = "area";
    double theta = 0.0;
    std::size_t tau = 20;
    std::string out;
    ProviderArgs provider;
};

int run_allocate(const AllocateArgs& a) {
    const ProblemConfig cfg = load_config(a.config);
    OptimizerParams params{a.theta, a.tau, parse_metric_flag(a.target)};
    std::optional<TableLookupProvider> table;
    const auto provider = make_provider(cfg, a.provider, table);

    std::printf("allocate: config=%s target=%s theta=%.9g tau=%zu\n", a.config.c_str(),
                metric_name(params.target), params.theta, params.tau);

    const MfsResult mfs = find_feasible_solution(cfg.implementations, cfg.network, cfg.budgets);
    if (!mfs.feasible()) {
        std::printf("infeasible: %s\n", mfs.reason.c_str());
        if (!mfs.blocking_layer.empty())
            std::printf("blocking layer: %s\n", mfs.blocking_layer.c_str());
        return kExitInfeasible;
    }
    const AllocationSolution mfs_solution =
        evaluate_solution(*mfs.pairs, cfg.implementations, cfg.network, cfg.score_weights,
                          *provider);
    std::printf("minimum feasible solution: score=%.9g\n", mfs_solution.score);
    for (const auto& [impl, layer] : mfs_solution.pairs)
        std::printf("  layer %s <- %s\n", layer.c_str(), impl.c_str());

    const OptimizeResult result = optimize(mfs, cfg.implementations, params, cfg.score_weights,
                                           *provider, cfg.budgets, cfg.network);
    std::printf("refinement trace:\n");
    for (const auto& it : result.trace)
        std::printf("  iter=%zu cost_sweeps=%zu %s_cost=%.9g score=%.9g best=%.9g\n", it.iteration,
                    it.cost_sweeps, metric_name(params.target),
                    it.target_cost * network_unit_factor(params.target), it.score_after,
                    it.best_score);

    const std::string report = solution_report(result.solution, cfg, true);
    std::fputs(report.c_str(), stdout);
    if (!a.out.empty()) {
        write_text_file(a.out, report);
        std::printf("wrote %s\n", a.out.c_str());
    }
    return kExitOk;
}

struct VerifyArgs {
    std::string config;
    std::string target = "area";
    double theta = 0.0;
    std::size_t tau = 20;
    std::uint64_t cap = 1000000;
    ProviderArgs provider;
};

int run_verify(const VerifyArgs& a) {
    const ProblemConfig cfg = load_config(a.config);
    OptimizerParams params{a.theta, a.tau, parse_metric_flag(a.target)};
    std::optional<TableLookupProvider> table;
    const auto provider = make_provider(cfg, a.provider, table);

    std::printf("verify: config=%s target=%s cap=%llu\n", a.config.c_str(),
                metric_name(params.target), static_cast<unsigned long long>(a.cap));

    const SearchResult oracle = exhaustive_search(cfg.implementations, cfg.network, cfg.budgets,
                                                  cfg.score_weights, *provider, a.cap);
    const MfsResult mfs = find_feasible_solution(cfg.implementations, cfg.network, cfg.budgets);

    if (!mfs.feasible() || !oracle.feasible()) {
        const bool both = !mfs.feasible() && !oracle.feasible();
        std::printf("optimizer: %s\n", mfs.feasible() ? "feasible" : "infeasible");
        std::printf("oracle: %s\n", oracle.feasible() ? "feasible" : "infeasible");
        std::printf("%s\n", both ? "MATCH" : "MISMATCH");
        return both ? kExitOk : 1;
    }

    const OptimizeResult opt = optimize(mfs, cfg.implementations, params, cfg.score_weights,
                                        *provider, cfg.budgets, cfg.network);
    std::printf("optimizer solution: score=%.9g\n", opt.solution.score);
    for (const auto& [impl, layer] : opt.solution.pairs)
        std::printf("  layer %s <- %s\n", layer.c_str(), impl.c_str());
    std::printf("oracle solution: score=%.9g\n", oracle.solution->score);
    for (const auto& [impl, layer] : oracle.solution->pairs)
        std::printf("  layer %s <- %s\n", layer.c_str(), impl.c_str());

    const double rel = std::abs(opt.solution.score - oracle.solution->score) /
                       std::max(1e-300, std::abs(oracle.solution->score));
    const bool match = rel <= 1e-9;
    std::printf("relative score gap: %.3g\n", rel);
    std::printf("%s\n", match ? "MATCH" : "MISMATCH");
    return match ? kExitOk : 1;
}

struct ScoreArgs {
    std::string config;
    std::string assignment;
};

int run_score(const ScoreArgs& a) {
    const ProblemConfig cfg = load_config(a.config);
    const auto ip = cfg.network.inner_product_layers();
    auto ids = split_list(a.assignment);
    if (ids.size() == 1 && ip.size() > 1) ids.assign(ip.size(), ids[0]);
    if (ids.size() != ip.size())
        throw ConfigError("--assignment needs one implementation id per inner-product layer (" +
                          std::to_string(ip.size()) + ")");
    std::vector<std::pair<std::string, std::string>> pairs;
    for (std::size_t i = 0; i < ip.size(); ++i) pairs.emplace_back(ids[i], ip[i]->id);

    const auto table = cfg.make_table_provider();
    const AllocationSolution sol =
        evaluate_solution(pairs, cfg.implementations, cfg.network, cfg.score_weights, table);
    for (Metric m : kAllMetrics)
        std::printf("%s: %.9g %s\n", metric_name(m),
                    sol.network_costs.at(m) * network_unit_factor(m), network_unit_name(m));
    std::printf("err: %.9g\n", sol.err);
    std::printf("score: %.9g\n", sol.score);
    return kExitOk;
}

struct ValidateArgs {
    std::string config;
};

int run_validate(const ValidateArgs& a) {
    const ProblemConfig cfg = load_config(a.config);
    const auto warnings = validate_cost_table(cfg.implementations);
    std::printf("validate: %zu warning(s)\n", warnings.size());
    for (const auto& w : warnings) std::printf("  %s\n", w.message().c_str());
    return kExitOk;
}

struct SimulateArgs {
    std::string config;
    std::string assignment;  // neuron kinds or implementation ids, IP-layer order
    std::string weights;
    std::string samples;
    std::size_t stream_length = 1024;
    std::uint64_t seed = 0;
};

int run_simulate(const SimulateArgs& a) {
    const ProblemConfig cfg = load_config(a.config);
    const auto ip = cfg.network.inner_product_layers();
    auto tokens = split_list(a.assignment);
    if (tokens.size() == 1 && ip.size() > 1) tokens.assign(ip.size(), tokens[0]);
    if (tokens.size() != ip.size())
        throw ConfigError("--assignment needs one entry per inner-product layer (" +
                          std::to_string(ip.size()) + ")");

    KindAssignment assignment;
    for (std::size_t i = 0; i < ip.size(); ++i) {
        const std::string& t = tokens[i];
        if (t == "apc" || t == "APC") {
            assignment[ip[i]->id] = NeuronKind::Apc;
        } else if (t == "mux" || t == "MUX") {
            assignment[ip[i]->id] = NeuronKind::Mux;
        } else {
            bool found = false;
            for (const auto& impl : cfg.implementations) {
                if (impl.id == t) {
                    assignment[ip[i]->id] = impl.neuron_kind;
                    found = true;
                    break;
                }
            }
            if (!found) throw ConfigError("unknown assignment token '" + t + "'");
        }
    }

    WeightSet ws = load_weight_set(cfg, a.weights);
    const auto samples = load_samples_csv(a.samples);
    GeneratorSpec gen{GeneratorMethod::Bernoulli, a.seed, 16};
    std::printf("simulate: config=%s samples=%zu m=%zu seed=%llu\n", a.config.c_str(),
                samples.size(), a.stream_length, static_cast<unsigned long long>(a.seed));
    const double err =
        estimate_error_rate(cfg.network, ws, assignment, samples, a.stream_length, gen);
    std::printf("err: %.9g\n", err);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic-computing DCNN simulator and design allocator"};
    app.require_subcommand(1);

    CharacterizeArgs ch;
    auto* characterize = app.add_subcommand("characterize", "Monte Carlo neuron error sweep");
    characterize->add_option("--impl", ch.impl, "neuron implementation: apc or mux")->required();
    characterize->add_option("--fan-ins", ch.fan_ins, "comma list of input sizes")
        ->required()
        ->delimiter(',');
    characterize->add_option("--stream-lengths", ch.stream_lengths, "comma list of bit lengths")
        ->required()
        ->delimiter(',');
    characterize->add_option("--trials", ch.trials, "Monte Carlo trials per point");
    characterize->add_option("--seed", ch.seed, "random seed");
    characterize->add_option("--out", ch.out, "output CSV path")->required();
    characterize->add_option("--threads", ch.threads, "worker threads (0 = auto)");

    CalibrateArgs ca;
    auto* calibrate = app.add_subcommand("calibrate", "pick the Btanh state count");
    calibrate->add_option("--fan-in", ca.fan_in, "neuron input size")->required();
    calibrate->add_option("--stream-length", ca.stream_length, "bit-stream length");
    calibrate->add_option("--candidates", ca.candidates, "candidate state counts")->delimiter(',');
    calibrate->add_option("--z-grid", ca.z_grid, "inner-product grid points")->delimiter(',');
    calibrate->add_option("--trials", ca.trials, "trials per grid point");
    calibrate->add_option("--seed", ca.seed, "random seed");

    AllocateArgs al;
    auto* allocate = app.add_subcommand("allocate", "minimum feasible solution + optimization");
    allocate->add_option("--config", al.config, "problem configuration JSON")->required();
    allocate->add_option("--target", al.target, "optimization target metric");
    allocate->add_option("--theta", al.theta, "inner-loop cost threshold");
    allocate->add_option("--tau", al.tau, "outer iteration limit");
    allocate->add_option("--out", al.out, "solution output path");
    allocate->add_option("--weights", al.provider.weights, "weight CSVs for simulated Err");
    allocate->add_option("--samples", al.provider.samples, "labeled samples for simulated Err");
    allocate->add_option("--sim-stream-length", al.provider.stream_length,
                         "stream length for simulated Err");
    allocate->add_option("--sim-seed", al.provider.seed, "seed for simulated Err");

    VerifyArgs ve;
    auto* verify = app.add_subcommand("verify", "compare optimizer against exhaustive search");
    verify->add_option("--config", ve.config, "problem configuration JSON")->required();
    verify->add_option("--target", ve.target, "optimization target metric");
    verify->add_option("--theta", ve.theta, "inner-loop cost threshold");
    verify->add_option("--tau", ve.tau, "outer iteration limit");
    verify->add_option("--cap", ve.cap, "enumeration cap");
    verify->add_option("--weights", ve.provider.weights, "weight CSVs for simulated Err");
    verify->add_option("--samples", ve.provider.samples, "labeled samples for simulated Err");
    verify->add_option("--sim-stream-length", ve.provider.stream_length,
                       "stream length for simulated Err");
    verify->add_option("--sim-seed", ve.provider.seed, "seed for simulated Err");

    ScoreArgs sc;
    auto* score_cmd = app.add_subcommand("score", "score one assignment from table data");
    score_cmd->add_option("--config", sc.config, "problem configuration JSON")->required();
    score_cmd->add_option("--assignment", sc.assignment, "implementation ids, layer order")
        ->required();

    ValidateArgs va;
    auto* validate = app.add_subcommand("validate", "check energy vs power*delay consistency");
    validate->add_option("--config", va.config, "problem configuration JSON")->required();

    SimulateArgs si;
    auto* simulate = app.add_subcommand("simulate", "SC forward-pass error rate");
    simulate->add_option("--config", si.config, "problem configuration JSON")->required();
    simulate->add_option("--assignment", si.assignment, "apc/mux or impl ids per layer")
        ->required();
    simulate->add_option("--weights", si.weights, "weight CSVs, layer order")->required();
    simulate->add_option("--samples", si.samples, "labeled sample CSV")->required();
    simulate->add_option("--stream-length", si.stream_length, "bit-stream length");
    simulate->add_option("--seed", si.seed, "random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (characterize->parsed()) return run_characterize(ch);
        if (calibrate->parsed()) return run_calibrate(ca);
        if (allocate->parsed()) return run_allocate(al);
        if (verify->parsed()) return run_verify(ve);
        if (score_cmd->parsed()) return run_score(sc);
        if (validate->parsed()) return run_validate(va);
        if (simulate->parsed()) return run_simulate(si);
    } catch (const CapExceededError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitCap;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
    return kExitUsage;
}
