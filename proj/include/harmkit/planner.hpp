#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>

#include "harmkit/harm.hpp"
#include "harmkit/model.hpp"

namespace harmkit::planner {

struct PlanOptions {
    harm::TraversalPolicy policy = harm::TraversalPolicy::Fidelity;
    std::optional<std::size_t> max_paths;
};

// Hosts, edges and (host, vulnerability) pairs a replan must avoid.
struct ExclusionSet {
    std::set<std::string> hosts;
    std::set<std::pair<std::string, std::string>> edges;
    std::set<std::pair<std::string, std::string>> host_vulnerabilities;

    bool empty() const { return hosts.empty() && edges.empty() && host_vulnerabilities.empty(); }
    std::size_t size() const {
        return hosts.size() + edges.size() + host_vulnerabilities.size();
    }
};

// Keeps the shortest paths, then the one with the highest path risk; any
// remaining tie falls to the lexicographically smallest host sequence.
AttackPlan plan_shortest_path(const Harm& harm, const std::string& target,
                              const PlanOptions& options = {});

// Picks the path with the highest success probability (shorter path, then
// lexicographic order on ties).
AttackPlan plan_composite_probability(const Harm& harm, const std::string& target,
                                      const PlanOptions& options = {});

// Greedy walk for an attacker who knows only its entry points: always move
// to the cheapest unvisited reachable neighbor until the target is appended,
// backtracking when a branch dead-ends. Throws StuckError (with the deepest
// prefix reached) when every option is exhausted.
AttackPlan plan_incremental_cost(const Harm& harm, const std::set<std::string>& entry_points,
                                 const std::string& target, const PlanOptions& options = {});

// Copy of the model with excluded hosts/edges removed and excluded
// (host, vulnerability) pairs stripped from their host's tree (re-folded).
Harm apply_exclusions(const Harm& harm, const ExclusionSet& excluded);

// Re-runs the chosen strategy on the reduced model. An empty exclusion set
// reproduces the original plan.
AttackPlan replan_after_failure(const Harm& harm, const std::string& target, Strategy strategy,
                                const ExclusionSet& excluded,
                                const std::set<std::string>& entry_points = {},
                                const PlanOptions& options = {});

}  // namespace harmkit::planner
