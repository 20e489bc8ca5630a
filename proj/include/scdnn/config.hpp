#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "scdnn/allocator.hpp"

namespace scdnn {

// One allocation problem as loaded from a configuration file. Budgets
// are already converted to layer base units.
struct ProblemConfig {
    NetworkSpec network;
    std::vector<ImplementationSpec> implementations;
    std::vector<Budget> budgets;
    ScoreWeights score_weights;
    std::vector<ErrorTableEntry> error_table;  // may be empty

    // Provider over the error table; throws ConfigError when no table
    // was given.
    TableLookupProvider make_table_provider() const;
};

ProblemConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");
ProblemConfig load_config(const std::filesystem::path& path);

// Canonical structured-text rendering of a solved allocation, stable
// byte-for-byte across reruns.
std::string solution_report(const AllocationSolution& solution, const ProblemConfig& config,
                            bool feasible);

}  // namespace scdnn
