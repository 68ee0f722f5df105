#pragma once

#include <optional>
#include <string>
#include <vector>

#include "harmkit/ingest.hpp"
#include "harmkit/model.hpp"

namespace harmkit::harm {

// Which hosts an attacker may move through. Fidelity mode lets any host
// with at least one finding be traversed; RequireExploit restricts
// movement to hosts with a CVE-bearing finding.
enum class TraversalPolicy { Fidelity, RequireExploit };

bool traversable(const Host& host, TraversalPolicy policy);

struct FoldResult {
    double success_prob = 0.0;
    double impact = 0.0;
    double attack_cost = 0.0;
};

// Folds a lower-layer tree into host metrics. Leaves yield their own
// metrics; OR gates take (max p, max impact, min cost) — the attacker picks
// the single best option; AND gates take (product p, sum impact, sum cost).
// An Empty tree yields (0, 0, +inf).
FoldResult fold_attack_tree(const AttackTreeNode& tree);

// Assembles the two-layer model: reachability on top, one attack tree per
// host below (a single OR gate over the host's findings), with folded host
// metrics. When a catalog is given, CVE-bearing findings are annotated with
// their exploit module.
Harm build_harm(const ingest::NetworkSpecFile& spec, const ingest::ScanResultFile& scan,
                const ReachabilityGraph& reach,
                const ingest::ExploitCatalogFile* catalog = nullptr);

struct EnumerateOptions {
    TraversalPolicy policy = TraversalPolicy::Fidelity;
    // Hard cap for pathological graphs; enumeration aborts with an error
    // rather than silently truncating.
    std::optional<std::size_t> max_paths;
    bool allow_unexploitable_target = false;
};

// All simple paths from the attacker node to the target, traversing only
// hosts the policy allows. Output is sorted lexicographically by host
// sequence. An unreachable target yields an empty vector, not an error.
std::vector<AttackPath> enumerate_attack_paths(const Harm& harm, const std::string& target,
                                               const EnumerateOptions& options = {});

// Graphviz rendering of the upper layer with per-host metric annotations.
std::string to_dot(const Harm& harm);

}  // namespace harmkit::harm
