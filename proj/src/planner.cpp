#include "harmkit/planner.hpp"

#include <algorithm>

#include "harmkit/metrics.hpp"

namespace harmkit::planner {
namespace {

// Which finding a plan binds on a host: the highest base score among
// CVE-bearing findings, lexicographically smallest id on ties. Fidelity
// mode falls back to the plain findings when no CVE is present (the hop is
// then lateral movement without an exploit module).
const Vulnerability& choose_vulnerability(const Host& host, harm::TraversalPolicy policy) {
    const Vulnerability* chosen = nullptr;
    auto consider = [&](const Vulnerability& v) {
        if (chosen == nullptr || v.cvss_bs > chosen->cvss_bs ||
            (v.cvss_bs == chosen->cvss_bs && v.id < chosen->id)) {
            chosen = &v;
        }
    };
    for (const Vulnerability& v : host.vulnerabilities) {
        if (v.executable) consider(v);
    }
    if (chosen == nullptr && policy == harm::TraversalPolicy::Fidelity) {
        for (const Vulnerability& v : host.vulnerabilities) consider(v);
    }
    if (chosen == nullptr) {
        throw HarmkitError(Errc::UnexploitableHost,
                          "host '" + host.id + "' offers nothing the policy can bind");
    }
    return *chosen;
}

AttackPlan bind_plan(const Harm& harm, AttackPath path, Strategy strategy,
                     harm::TraversalPolicy policy, std::map<std::string, double> provenance) {
    AttackPlan plan;
    plan.strategy = strategy;
    plan.source_path = std::move(path);
    plan.provenance = std::move(provenance);
    for (const std::string& id : plan.source_path.hosts) {
        const Vulnerability& vuln = choose_vulnerability(harm.host(id), policy);
        plan.steps.push_back({id, vuln.id, vuln.exploit_module});
    }
    plan.validate_against(harm);
    return plan;
}

harm::EnumerateOptions enumerate_options(const PlanOptions& options) {
    harm::EnumerateOptions opts;
    opts.policy = options.policy;
    opts.max_paths = options.max_paths;
    return opts;
}

}  // namespace

AttackPlan plan_shortest_path(const Harm& harm, const std::string& target,
                              const PlanOptions& options) {
    std::vector<AttackPath> paths =
        harm::enumerate_attack_paths(harm, target, enumerate_options(options));
    if (paths.empty()) throw NoPathError("no attack path reaches '" + target + "'");

    int sp = metrics::shortest_path_metric(paths);
    const AttackPath* best = nullptr;
    double best_risk = 0.0;
    int candidates = 0;
    // paths are in lexicographic order, so on equal risk the first stays.
    for (const AttackPath& p : paths) {
        if (p.length() != sp) continue;
        ++candidates;
        double risk = metrics::path_risk(p, harm);
        if (best == nullptr || risk > best_risk) {
            best = &p;
            best_risk = risk;
        }
    }
    return bind_plan(harm, *best, Strategy::ShortestPath, options.policy,
                     {{"sp", static_cast<double>(sp)},
                      {"path_risk", best_risk},
                      {"shortest_path_candidates", static_cast<double>(candidates)}});
}

AttackPlan plan_composite_probability(const Harm& harm, const std::string& target,
                                      const PlanOptions& options) {
    std::vector<AttackPath> paths =
        harm::enumerate_attack_paths(harm, target, enumerate_options(options));
    if (paths.empty()) throw NoPathError("no attack path reaches '" + target + "'");
    auto [probability, best] = metrics::max_path_probability(paths, harm);
    return bind_plan(harm, best, Strategy::CompositeProbability, options.policy,
                     {{"path_probability", probability}});
}

AttackPlan plan_incremental_cost(const Harm& harm, const std::set<std::string>& entry_points,
                                 const std::string& target, const PlanOptions& options) {
    if (entry_points.empty()) throw NoPathError("no entry points for the incremental walk");
    const Host& target_host = harm.host(target);
    if (!harm::traversable(target_host, options.policy)) {
        throw HarmkitError(Errc::UnexploitableHost,
                          "target '" + target + "' has no vulnerability the policy accepts");
    }
    for (const std::string& id : entry_points) {
        harm.host(id);  // throws UnknownHost
        if (!harm.upper.has_edge(kAttackerNode, id)) {
            throw HarmkitError(Errc::Invariant,
                              "entry point '" + id + "' is not reachable from the attacker");
        }
    }

    // Candidates at each level, cheapest first; ties go to the smaller id.
    auto ranked = [&](const std::vector<std::string>& ids,
                      const std::set<std::string>& visited) {
        std::vector<const Host*> hosts;
        for (const std::string& id : ids) {
            if (id == kAttackerNode || visited.count(id) != 0) continue;
            const Host& h = harm.host(id);
            if (!harm::traversable(h, options.policy)) continue;
            hosts.push_back(&h);
        }
        std::sort(hosts.begin(), hosts.end(), [](const Host* a, const Host* b) {
            if (a->attack_cost != b->attack_cost) return a->attack_cost < b->attack_cost;
            return a->id < b->id;
        });
        return hosts;
    };

    std::vector<std::string> walk;
    std::set<std::string> visited;
    std::vector<std::string> deepest;
    double walk_cost = 0.0;

    // Greedy walk with backtracking: descend into the cheapest unvisited
    // neighbor; when a branch dead-ends, step back and take the next one.
    auto descend = [&](auto&& self, const Host& current) -> bool {
        walk.push_back(current.id);
        visited.insert(current.id);
        walk_cost += current.attack_cost;
        if (walk.size() > deepest.size()) deepest = walk;
        if (current.id == target) return true;
        for (const Host* next : ranked(harm.upper.successors(current.id), visited)) {
            if (self(self, *next)) return true;
        }
        walk.pop_back();
        visited.erase(current.id);
        walk_cost -= current.attack_cost;
        return false;
    };

    std::vector<std::string> entry_ids(entry_points.begin(), entry_points.end());
    for (const Host* entry : ranked(entry_ids, visited)) {
        if (descend(descend, *entry)) {
            AttackPath path = AttackPath::checked(walk, harm.upper);
            return bind_plan(harm, std::move(path), Strategy::IncrementalCost, options.policy,
                             {{"path_attack_cost", walk_cost}});
        }
    }
    throw StuckError("incremental walk exhausted every option before reaching '" + target + "'",
                     deepest);
}

Harm apply_exclusions(const Harm& harm, const ExclusionSet& excluded) {
    Harm reduced;
    for (const std::string& node : harm.upper.nodes) {
        if (excluded.hosts.count(node) == 0) reduced.upper.nodes.insert(node);
    }
    for (const auto& edge : harm.upper.edges) {
        if (excluded.hosts.count(edge.first) != 0 || excluded.hosts.count(edge.second) != 0) {
            continue;
        }
        if (excluded.edges.count(edge) != 0) continue;
        reduced.upper.edges.insert(edge);
    }

    for (const auto& [id, host] : harm.hosts) {
        if (excluded.hosts.count(id) != 0) continue;
        Host kept = host;
        bool stripped = false;
        auto dropped = [&](const Vulnerability& v) {
            return excluded.host_vulnerabilities.count({id, v.id}) != 0;
        };
        if (std::any_of(kept.vulnerabilities.begin(), kept.vulnerabilities.end(), dropped)) {
            stripped = true;
            kept.vulnerabilities.erase(
                std::remove_if(kept.vulnerabilities.begin(), kept.vulnerabilities.end(), dropped),
                kept.vulnerabilities.end());
        }
        if (stripped) {
            if (kept.vulnerabilities.empty()) {
                kept.attack_tree = AttackTreeNode::empty();
            } else {
                std::vector<AttackTreeNode> leaves;
                for (const Vulnerability& v : kept.vulnerabilities) {
                    leaves.push_back(AttackTreeNode::leaf(v));
                }
                kept.attack_tree = AttackTreeNode::or_gate(std::move(leaves));
            }
            harm::FoldResult folded = harm::fold_attack_tree(kept.attack_tree);
            kept.success_prob = folded.success_prob;
            kept.impact = folded.impact;
            kept.attack_cost = folded.attack_cost;
            kept.risk = kept.success_prob * kept.impact;
        }
        reduced.lower.emplace(id, kept.attack_tree);
        reduced.hosts.emplace(id, std::move(kept));
    }
    reduced.validate();
    return reduced;
}

AttackPlan replan_after_failure(const Harm& harm, const std::string& target, Strategy strategy,
                                const ExclusionSet& excluded,
                                const std::set<std::string>& entry_points,
                                const PlanOptions& options) {
    if (excluded.hosts.count(target) != 0) {
        throw NoPathError("target '" + target + "' is excluded");
    }
    Harm reduced = apply_exclusions(harm, excluded);
    try {
        switch (strategy) {
            case Strategy::ShortestPath:
                return plan_shortest_path(reduced, target, options);
            case Strategy::CompositeProbability:
                return plan_composite_probability(reduced, target, options);
            case Strategy::IncrementalCost: {
                std::set<std::string> entries;
                for (const std::string& id : entry_points) {
                    if (reduced.hosts.count(id) != 0 &&
                        reduced.upper.has_edge(kAttackerNode, id)) {
                        entries.insert(id);
                    }
                }
                if (entries.empty()) {
                    throw NoPathError("every entry point is excluded or severed");
                }
                return plan_incremental_cost(reduced, entries, target, options);
            }
        }
        throw HarmkitError(Errc::Invariant, "unknown strategy");
    } catch (const HarmkitError& e) {
        // A target stripped of its findings is as unreachable as a cut graph.
        if (e.code() == Errc::UnexploitableHost) throw NoPathError(e.what());
        throw;
    }
}

}  // namespace harmkit::planner
