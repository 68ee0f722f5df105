#include "harmkit/harm.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <sstream>

namespace harmkit::harm {

bool traversable(const Host& host, TraversalPolicy policy) {
    return policy == TraversalPolicy::Fidelity ? host.exploitable()
                                               : host.has_executable_vuln();
}

FoldResult fold_attack_tree(const AttackTreeNode& tree) {
    switch (tree.kind) {
        case AttackTreeNode::Kind::Empty:
            return {0.0, 0.0, std::numeric_limits<double>::infinity()};
        case AttackTreeNode::Kind::Leaf:
            return {tree.vuln->success_prob, tree.vuln->impact, tree.vuln->attack_cost};
        case AttackTreeNode::Kind::Gate:
            break;
    }
    tree.validate();
    FoldResult folded;
    if (tree.gate == GateType::Or) {
        folded.attack_cost = std::numeric_limits<double>::infinity();
        for (const AttackTreeNode& child : tree.children) {
            FoldResult f = fold_attack_tree(child);
            folded.success_prob = std::max(folded.success_prob, f.success_prob);
            folded.impact = std::max(folded.impact, f.impact);
            folded.attack_cost = std::min(folded.attack_cost, f.attack_cost);
        }
    } else {
        folded.success_prob = 1.0;
        for (const AttackTreeNode& child : tree.children) {
            FoldResult f = fold_attack_tree(child);
            folded.success_prob *= f.success_prob;
            folded.impact += f.impact;
            folded.attack_cost += f.attack_cost;
        }
    }
    return folded;
}

Harm build_harm(const ingest::NetworkSpecFile& spec, const ingest::ScanResultFile& scan,
                const ReachabilityGraph& reach, const ingest::ExploitCatalogFile* catalog) {
    std::set<std::string> expected{kAttackerNode};
    for (const ingest::SpecHost& h : spec.hosts) expected.insert(h.id);
    if (reach.nodes != expected) {
        throw HarmkitError(Errc::InconsistentHostSet,
                          "reachability graph nodes do not match the network spec hosts");
    }
    for (const ingest::ScanRecord& rec : scan.records) {
        if (!spec.has_host(rec.host_id)) {
            throw HarmkitError(Errc::InconsistentHostSet,
                              "scan references host '" + rec.host_id +
                                  "' missing from the network spec");
        }
    }

    Harm model;
    model.upper = reach;
    for (const ingest::SpecHost& spec_host : spec.hosts) {
        Host host;
        host.id = spec_host.id;
        host.os = spec_host.os;
        host.running = spec_host.running;
        for (const ingest::ScanRecord& rec : scan.records) {
            if (rec.host_id != spec_host.id) continue;
            Vulnerability v = Vulnerability::make(rec.vuln_id(), rec.vuln_name, rec.cvss_bs,
                                                  rec.executable());
            if (v.executable && catalog != nullptr) {
                if (const ingest::CatalogEntry* entry = catalog->find(v.id)) {
                    v.exploit_module = entry->exploit_module;
                }
            }
            host.vulnerabilities.push_back(std::move(v));
        }

        if (host.vulnerabilities.empty()) {
            host.attack_tree = AttackTreeNode::empty();
        } else {
            std::vector<AttackTreeNode> leaves;
            leaves.reserve(host.vulnerabilities.size());
            for (const Vulnerability& v : host.vulnerabilities) {
                leaves.push_back(AttackTreeNode::leaf(v));
            }
            host.attack_tree = AttackTreeNode::or_gate(std::move(leaves));
        }

        FoldResult folded = fold_attack_tree(host.attack_tree);
        host.success_prob = folded.success_prob;
        host.impact = folded.impact;
        host.attack_cost = folded.attack_cost;
        host.risk = host.success_prob * host.impact;

        model.lower.emplace(host.id, host.attack_tree);
        model.hosts.emplace(host.id, std::move(host));
    }
    model.validate();
    return model;
}

namespace {

struct PathSearch {
    const Harm& harm;
    const std::string& target;
    const EnumerateOptions& options;
    std::vector<std::string> stack;
    std::set<std::string> visited;
    std::vector<AttackPath> found;

    void check_cap() const {
        if (options.max_paths && found.size() > *options.max_paths) {
            throw HarmkitError(Errc::Invariant,
                              "attack-path cap of " + std::to_string(*options.max_paths) +
                                  " exceeded");
        }
    }

    void expand(const std::string& node) {
        for (const std::string& next : harm.upper.successors(node)) {
            if (visited.count(next) != 0) continue;
            if (next == target) {
                AttackPath path;
                path.hosts = stack;
                path.hosts.push_back(next);
                found.push_back(std::move(path));
                check_cap();
                continue;
            }
            if (!traversable(harm.host(next), options.policy)) continue;
            visited.insert(next);
            stack.push_back(next);
            expand(next);
            stack.pop_back();
            visited.erase(next);
        }
    }
};

std::string format_metric(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    return buf;
}

}  // namespace

std::vector<AttackPath> enumerate_attack_paths(const Harm& harm, const std::string& target,
                                               const EnumerateOptions& options) {
    const Host& target_host = harm.host(target);  // throws UnknownHost
    if (!options.allow_unexploitable_target && !traversable(target_host, options.policy)) {
        throw HarmkitError(Errc::UnexploitableHost,
                          "target '" + target + "' has no vulnerability the policy accepts");
    }

    PathSearch search{harm, target, options, {}, {}, {}};
    search.expand(kAttackerNode);

    // DFS over sorted successors already yields this order; the sort pins
    // the contract regardless of traversal details.
    std::sort(search.found.begin(), search.found.end(),
              [](const AttackPath& a, const AttackPath& b) { return a.hosts < b.hosts; });
    return search.found;
}

std::string to_dot(const Harm& harm) {
    std::ostringstream out;
    out << "digraph harm {\n";
    out << "  \"" << kAttackerNode << "\" [shape=diamond];\n";
    for (const auto& [id, host] : harm.hosts) {
        out << "  \"" << id << "\" [label=\"" << id;
        if (host.exploitable()) {
            out << "\\np=" << format_metric(host.success_prob)
                << " aim=" << format_metric(host.impact) << " r=" << format_metric(host.risk)
                << " ac=" << format_metric(host.attack_cost);
        } else {
            out << "\\nunexploitable";
        }
        if (!host.running) out << "\\ndown";
        out << "\"];\n";
    }
    for (const auto& [from, to] : harm.upper.edges) {
        out << "  \"" << from << "\" -> \"" << to << "\";\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace harmkit::harm
