#include "harmkit/model.hpp"

#include <algorithm>
#include <cmath>

namespace harmkit {

const char* errc_name(Errc code) {
    switch (code) {
        case Errc::Syntax: return "syntax";
        case Errc::DuplicateHost: return "duplicate_host";
        case Errc::UnknownTarget: return "unknown_target";
        case Errc::UnknownHost: return "unknown_host";
        case Errc::UnresolvedLabel: return "unresolved_label";
        case Errc::DuplicateCve: return "duplicate_cve";
        case Errc::InconsistentHostSet: return "inconsistent_host_set";
        case Errc::NoPath: return "no_path";
        case Errc::Stuck: return "stuck";
        case Errc::UnexploitableHost: return "unexploitable_host";
        case Errc::ExploitNotFound: return "exploit_not_found";
        case Errc::NotExecutable: return "not_executable";
        case Errc::UnresolvedStep: return "unresolved_step";
        case Errc::EmptyScan: return "empty_scan";
        case Errc::Invariant: return "invariant";
        case Errc::Io: return "io";
    }
    return "unknown";
}

std::string ParseError::position_prefix(int line, int column) {
    if (line <= 0) return "";
    std::string prefix = "line " + std::to_string(line);
    if (column > 0) prefix += ", column " + std::to_string(column);
    return prefix + ": ";
}

Severity severity_from_score(double cvss_bs) {
    if (cvss_bs >= 7.0) return Severity::High;
    if (cvss_bs >= 4.0) return Severity::Medium;
    return Severity::Low;
}

const char* to_string(Severity s) {
    switch (s) {
        case Severity::High: return "high";
        case Severity::Medium: return "medium";
        case Severity::Low: return "low";
    }
    return "low";
}

Vulnerability Vulnerability::make(std::string id, std::string name, double cvss_bs,
                                  bool executable) {
    if (!(cvss_bs >= 0.0 && cvss_bs <= 10.0)) {
        throw HarmkitError(Errc::Invariant,
                          "cvss_bs " + std::to_string(cvss_bs) + " out of [0, 10] for '" +
                              id + "'");
    }
    if (id.empty()) {
        throw HarmkitError(Errc::Invariant, "vulnerability id must not be empty");
    }
    Vulnerability v;
    v.id = std::move(id);
    v.name = std::move(name);
    v.cvss_bs = cvss_bs;
    v.severity = severity_from_score(cvss_bs);
    v.success_prob = cvss_bs / 10.0;
    v.impact = cvss_bs;
    v.attack_cost = std::max(1.0, 10.0 - cvss_bs);
    v.executable = executable;
    return v;
}

AttackTreeNode AttackTreeNode::leaf(Vulnerability v) {
    AttackTreeNode node;
    node.kind = Kind::Leaf;
    node.vuln = std::move(v);
    return node;
}

AttackTreeNode AttackTreeNode::or_gate(std::vector<AttackTreeNode> children) {
    AttackTreeNode node;
    node.kind = Kind::Gate;
    node.gate = GateType::Or;
    node.children = std::move(children);
    node.validate();
    return node;
}

AttackTreeNode AttackTreeNode::and_gate(std::vector<AttackTreeNode> children) {
    AttackTreeNode node;
    node.kind = Kind::Gate;
    node.gate = GateType::And;
    node.children = std::move(children);
    node.validate();
    return node;
}

AttackTreeNode AttackTreeNode::empty() { return AttackTreeNode{}; }

void AttackTreeNode::validate(const std::vector<Vulnerability>* owner_vulns) const {
    switch (kind) {
        case Kind::Empty:
            if (!children.empty() || vuln.has_value()) {
                throw HarmkitError(Errc::Invariant, "empty tree node must carry nothing");
            }
            return;
        case Kind::Leaf: {
            if (!vuln.has_value()) {
                throw HarmkitError(Errc::Invariant, "leaf node without a vulnerability");
            }
            if (!children.empty()) {
                throw HarmkitError(Errc::Invariant, "leaf node must not have children");
            }
            if (owner_vulns != nullptr) {
                auto match = std::find_if(owner_vulns->begin(), owner_vulns->end(),
                                          [&](const Vulnerability& v) { return v.id == vuln->id; });
                if (match == owner_vulns->end()) {
                    throw HarmkitError(Errc::Invariant,
                                      "leaf references unknown vulnerability '" + vuln->id + "'");
                }
            }
            return;
        }
        case Kind::Gate:
            if (children.empty()) {
                throw HarmkitError(Errc::Invariant, "gate node needs at least one child");
            }
            for (const AttackTreeNode& child : children) child.validate(owner_vulns);
            return;
    }
}

bool Host::has_executable_vuln() const {
    return std::any_of(vulnerabilities.begin(), vulnerabilities.end(),
                       [](const Vulnerability& v) { return v.executable; });
}

const Vulnerability* Host::find_vulnerability(const std::string& vuln_id) const {
    for (const Vulnerability& v : vulnerabilities) {
        if (v.id == vuln_id) return &v;
    }
    return nullptr;
}

void ReachabilityGraph::add_edge(const std::string& from, const std::string& to) {
    if (!has_node(from) || !has_node(to)) {
        throw HarmkitError(Errc::Invariant, "edge endpoint missing: " + from + " -> " + to);
    }
    if (from == to) {
        throw HarmkitError(Errc::Invariant, "self-loop rejected on " + from);
    }
    if (to == kAttackerNode) {
        throw HarmkitError(Errc::Invariant, "attacker node cannot have inbound edges");
    }
    edges.insert({from, to});
}

std::vector<std::string> ReachabilityGraph::successors(const std::string& from) const {
    std::vector<std::string> out;
    auto it = edges.lower_bound({from, std::string()});
    for (; it != edges.end() && it->first == from; ++it) out.push_back(it->second);
    return out;  // set iteration keeps this sorted
}

void ReachabilityGraph::validate() const {
    for (const auto& [from, to] : edges) {
        if (!has_node(from) || !has_node(to)) {
            throw HarmkitError(Errc::Invariant, "dangling edge " + from + " -> " + to);
        }
        if (from == to) {
            throw HarmkitError(Errc::Invariant, "self-loop on " + from);
        }
        if (to == kAttackerNode) {
            throw HarmkitError(Errc::Invariant, "inbound edge to attacker from " + from);
        }
    }
}

const Host& Harm::host(const std::string& id) const {
    auto it = hosts.find(id);
    if (it == hosts.end()) {
        throw HarmkitError(Errc::UnknownHost, "unknown host '" + id + "'");
    }
    return it->second;
}

void Harm::validate() const {
    upper.validate();
    std::set<std::string> upper_hosts;
    for (const std::string& node : upper.nodes) {
        if (node != kAttackerNode) upper_hosts.insert(node);
    }
    auto keys_of = [](const auto& m) {
        std::set<std::string> keys;
        for (const auto& [k, v] : m) keys.insert(k);
        return keys;
    };
    if (keys_of(hosts) != upper_hosts || keys_of(lower) != upper_hosts) {
        throw HarmkitError(Errc::InconsistentHostSet,
                          "upper-layer nodes and lower-layer host maps disagree");
    }
    for (const auto& [id, h] : hosts) {
        h.attack_tree.validate(&h.vulnerabilities);
        if (h.exploitable() && std::abs(h.risk - h.success_prob * h.impact) > 1e-12) {
            throw HarmkitError(Errc::Invariant, "host risk out of sync on " + id);
        }
    }
}

AttackPath AttackPath::checked(std::vector<std::string> hosts, const ReachabilityGraph& graph) {
    if (hosts.empty()) {
        throw HarmkitError(Errc::Invariant, "attack path must contain at least one host");
    }
    std::set<std::string> seen;
    for (const std::string& id : hosts) {
        if (id == kAttackerNode) {
            throw HarmkitError(Errc::Invariant, "attacker node cannot appear on a path");
        }
        if (!seen.insert(id).second) {
            throw HarmkitError(Errc::Invariant, "repeated host '" + id + "' on path");
        }
        if (!graph.has_node(id)) {
            throw HarmkitError(Errc::UnknownHost, "path references unknown host '" + id + "'");
        }
    }
    if (!graph.has_edge(kAttackerNode, hosts.front())) {
        throw HarmkitError(Errc::Invariant,
                          "path head '" + hosts.front() + "' is not attacker-adjacent");
    }
    for (std::size_t i = 0; i + 1 < hosts.size(); ++i) {
        if (!graph.has_edge(hosts[i], hosts[i + 1])) {
            throw HarmkitError(Errc::Invariant,
                              "missing edge " + hosts[i] + " -> " + hosts[i + 1]);
        }
    }
    AttackPath path;
    path.hosts = std::move(hosts);
    return path;
}

const char* to_string(Strategy s) {
    switch (s) {
        case Strategy::ShortestPath: return "shortest_path";
        case Strategy::CompositeProbability: return "composite_probability";
        case Strategy::IncrementalCost: return "incremental_cost";
    }
    return "shortest_path";
}

std::optional<Strategy> strategy_from_string(std::string_view text) {
    if (text == "shortest_path" || text == "shortest") return Strategy::ShortestPath;
    if (text == "composite_probability" || text == "composite") return Strategy::CompositeProbability;
    if (text == "incremental_cost" || text == "incremental") return Strategy::IncrementalCost;
    return std::nullopt;
}

void AttackPlan::validate_against(const Harm& harm) const {
    if (steps.size() != source_path.hosts.size()) {
        throw HarmkitError(Errc::Invariant, "plan steps do not cover the source path");
    }
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (steps[i].host_id != source_path.hosts[i]) {
            throw HarmkitError(Errc::Invariant, "plan step order diverges from source path");
        }
        const Host& h = harm.host(steps[i].host_id);
        if (h.find_vulnerability(steps[i].vulnerability_id) == nullptr) {
            throw HarmkitError(Errc::Invariant,
                              "step binds vulnerability '" + steps[i].vulnerability_id +
                                  "' not present on host " + steps[i].host_id);
        }
    }
    AttackPath::checked(source_path.hosts, harm.upper);
}

const char* to_string(FailureReason r) {
    switch (r) {
        case FailureReason::HostDown: return "host_down";
        case FailureReason::NotExploitable: return "not_exploitable";
        case FailureReason::Timeout: return "timeout";
    }
    return "host_down";
}

std::optional<FailureReason> failure_reason_from_string(std::string_view text) {
    if (text == "host_down") return FailureReason::HostDown;
    if (text == "not_exploitable") return FailureReason::NotExploitable;
    if (text == "timeout") return FailureReason::Timeout;
    return std::nullopt;
}

void AttackReport::validate() const {
    int exploited = 0;
    for (const ReportEntry& e : entries) {
        if (e.host_exploited) ++exploited;
        if (e.host_exploited == e.failure_reason.has_value()) {
            throw HarmkitError(Errc::Invariant,
                              "entry for " + e.host_id +
                                  " must carry a failure reason exactly when it failed");
        }
    }
    if (exploited != total_exploited) {
        throw HarmkitError(Errc::Invariant, "total_exploited does not match entries");
    }
}

}  // namespace harmkit
