#pragma once

#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "harmkit/errors.hpp"

namespace harmkit {

// Reserved node id for the attacker's position in the reachability graph.
// It is never a host and never the destination of an edge.
inline constexpr const char* kAttackerNode = "attacker";

enum class Severity { High, Medium, Low };

// CVSS base-score bands: >= 7.0 High, >= 4.0 Medium, else Low.
Severity severity_from_score(double cvss_bs);
const char* to_string(Severity s);

// One scanner finding on one host. Derived metrics are fixed functions of
// the base score:
//   success_prob = cvss_bs / 10
//   impact       = cvss_bs
//   attack_cost  = max(1, 10 - cvss_bs)   (severe bugs are cheap to exploit)
struct Vulnerability {
    std::string id;    // CVE id when the scanner reported one, otherwise the finding name
    std::string name;
    double cvss_bs = 0.0;
    Severity severity = Severity::Low;
    double success_prob = 0.0;
    double impact = 0.0;
    double attack_cost = 1.0;
    bool executable = false;  // true iff the finding carried a CVE id
    std::optional<std::string> exploit_module;

    // Validates the score range and fills every derived field.
    static Vulnerability make(std::string id, std::string name, double cvss_bs,
                              bool executable);
};

enum class GateType { Or, And };

// Lower-layer attack tree of one host. Leaves carry the vulnerability they
// stand for; an Empty node marks a host with nothing to exploit.
struct AttackTreeNode {
    enum class Kind { Leaf, Gate, Empty };

    Kind kind = Kind::Empty;
    GateType gate = GateType::Or;        // Gate nodes only
    std::optional<Vulnerability> vuln;   // Leaf nodes only
    std::vector<AttackTreeNode> children;

    static AttackTreeNode leaf(Vulnerability v);
    static AttackTreeNode or_gate(std::vector<AttackTreeNode> children);
    static AttackTreeNode and_gate(std::vector<AttackTreeNode> children);
    static AttackTreeNode empty();

    bool is_empty() const { return kind == Kind::Empty; }

    // Checks gate arity and, when an owner is given, that every leaf
    // references one of the owner's vulnerabilities.
    void validate(const std::vector<Vulnerability>* owner_vulns = nullptr) const;
};

struct Host {
    std::string id;
    std::string os;
    bool running = true;
    std::vector<Vulnerability> vulnerabilities;
    AttackTreeNode attack_tree;

    // Folded tree metrics. attack_cost stays +inf for a host with no
    // vulnerabilities; serializers must emit the unexploitable marker
    // instead of a raw infinity.
    double success_prob = 0.0;
    double impact = 0.0;
    double risk = 0.0;
    double attack_cost = std::numeric_limits<double>::infinity();

    bool exploitable() const { return !vulnerabilities.empty(); }
    bool has_executable_vuln() const;
    const Vulnerability* find_vulnerability(const std::string& vuln_id) const;
};

// Upper layer: directed host reachability. Nodes are host ids plus the
// attacker node; edges are ordered pairs with no self-loops and nothing
// pointing back at the attacker.
struct ReachabilityGraph {
    std::set<std::string> nodes;
    std::set<std::pair<std::string, std::string>> edges;

    bool has_node(const std::string& id) const { return nodes.count(id) != 0; }
    bool has_edge(const std::string& from, const std::string& to) const {
        return edges.count({from, to}) != 0;
    }

    // Validates endpoints, self-loops and the attacker-has-no-inbound rule.
    void add_edge(const std::string& from, const std::string& to);

    // Out-neighbors in lexicographic order.
    std::vector<std::string> successors(const std::string& from) const;

    void validate() const;
};

// Two-layer model: reachability on top, per-host attack trees below.
struct Harm {
    ReachabilityGraph upper;
    std::map<std::string, AttackTreeNode> lower;
    std::map<std::string, Host> hosts;

    const Host& host(const std::string& id) const;  // throws UnknownHost
    void validate() const;
};

// Host sequence from an attacker entry point to a target. The attacker node
// itself is not stored and does not count toward the length.
struct AttackPath {
    std::vector<std::string> hosts;

    int length() const { return static_cast<int>(hosts.size()); }
    const std::string& target() const { return hosts.back(); }

    // Rejects empty sequences, repeated hosts, missing edges and a first
    // host that is not attacker-adjacent.
    static AttackPath checked(std::vector<std::string> hosts, const ReachabilityGraph& graph);
};

enum class Strategy { ShortestPath, CompositeProbability, IncrementalCost };
const char* to_string(Strategy s);
std::optional<Strategy> strategy_from_string(std::string_view text);

struct PlanStep {
    std::string host_id;
    std::string vulnerability_id;
    std::optional<std::string> exploit_module;
};

struct AttackPlan {
    Strategy strategy = Strategy::ShortestPath;
    std::vector<PlanStep> steps;
    AttackPath source_path;
    std::map<std::string, double> provenance;  // metric values that justified the choice

    const std::string& target() const { return source_path.target(); }

    // Steps must mirror source_path and bind vulnerabilities the hosts own.
    void validate_against(const Harm& harm) const;
};

enum class FailureReason { HostDown, NotExploitable, Timeout };
const char* to_string(FailureReason r);
std::optional<FailureReason> failure_reason_from_string(std::string_view text);

struct ReportEntry {
    std::string order_label;  // "Host 001", "Host 002", ...
    std::string host_id;
    bool host_running = true;
    bool host_exploited = false;
    std::string cve_id;        // vulnerability id the plan bound for this hop
    std::string exploit_used;  // empty when no exploit module was involved
    std::string payload_used;
    std::vector<std::string> associated_vulnerabilities;
    std::optional<FailureReason> failure_reason;
};

struct AttackReport {
    std::string attacker_id;
    int total_exploited = 0;
    std::vector<ReportEntry> entries;

    void validate() const;
};

struct SeverityPercentages {
    double high = 0.0;
    double medium = 0.0;
    double low = 0.0;
};

struct MetricsReport {
    int nas = 0;
    double aim = 0.0;
    double roa = 0.0;
    SeverityPercentages severity_pct;
    int sp = 0;  // 0 when no path exists
};

}  // namespace harmkit
