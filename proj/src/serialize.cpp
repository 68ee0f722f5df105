#include "harmkit/serialize.hpp"

#include <algorithm>
#include <cctype>

#include "harmkit/harm.hpp"

namespace harmkit::serialize {
namespace {

const json& field(const json& j, const char* name) {
    auto it = j.find(name);
    if (it == j.end()) {
        throw ParseError(Errc::Syntax, std::string("missing field '") + name + "'");
    }
    return *it;
}

template <typename Fn>
auto guarded(const char* what, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const json::exception& e) {
        throw ParseError(Errc::Syntax, std::string(what) + ": " + e.what());
    }
}

// One field of the line-oriented form. Reparsing must give the value back
// unchanged, so the delimiter, newlines and padding are rejected here.
const std::string& text_field(const std::string& value) {
    if (value.find('|') != std::string::npos || value.find('\n') != std::string::npos) {
        throw HarmkitError(Errc::Invariant,
                          "field value '" + value + "' cannot appear in the line format");
    }
    if (!value.empty() &&
        (std::isspace(static_cast<unsigned char>(value.front())) ||
         std::isspace(static_cast<unsigned char>(value.back())))) {
        throw HarmkitError(Errc::Invariant,
                          "field value '" + value + "' has padding the parser would strip");
    }
    return value;
}

std::string score_text(double value) { return json(value).dump(); }

}  // namespace

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(Errc::Syntax, std::string("invalid JSON: ") + e.what());
    }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json to_json(const Vulnerability& v) {
    json j{{"id", v.id},
           {"name", v.name},
           {"cvss_bs", v.cvss_bs},
           {"executable", v.executable}};
    if (v.exploit_module) j["exploit_module"] = *v.exploit_module;
    return j;
}

Vulnerability vulnerability_from_json(const json& j) {
    return guarded("vulnerability", [&] {
        Vulnerability v = Vulnerability::make(field(j, "id").get<std::string>(),
                                              field(j, "name").get<std::string>(),
                                              field(j, "cvss_bs").get<double>(),
                                              field(j, "executable").get<bool>());
        if (j.contains("exploit_module") && !j["exploit_module"].is_null()) {
            v.exploit_module = j["exploit_module"].get<std::string>();
        }
        return v;
    });
}

json to_json(const AttackTreeNode& node) {
    switch (node.kind) {
        case AttackTreeNode::Kind::Empty:
            return json{{"kind", "empty"}};
        case AttackTreeNode::Kind::Leaf:
            return json{{"kind", "leaf"}, {"vulnerability", to_json(*node.vuln)}};
        case AttackTreeNode::Kind::Gate:
            break;
    }
    json children = json::array();
    for (const AttackTreeNode& child : node.children) children.push_back(to_json(child));
    return json{{"kind", "gate"},
                {"gate", node.gate == GateType::Or ? "or" : "and"},
                {"children", std::move(children)}};
}

AttackTreeNode attack_tree_from_json(const json& j) {
    return guarded("attack_tree", [&]() -> AttackTreeNode {
        const std::string kind = field(j, "kind").get<std::string>();
        if (kind == "empty") return AttackTreeNode::empty();
        if (kind == "leaf") {
            return AttackTreeNode::leaf(vulnerability_from_json(field(j, "vulnerability")));
        }
        if (kind == "gate") {
            std::vector<AttackTreeNode> children;
            for (const json& child : field(j, "children")) {
                children.push_back(attack_tree_from_json(child));
            }
            const std::string gate = field(j, "gate").get<std::string>();
            if (gate == "or") return AttackTreeNode::or_gate(std::move(children));
            if (gate == "and") return AttackTreeNode::and_gate(std::move(children));
            throw ParseError(Errc::Syntax, "unknown gate type '" + gate + "'");
        }
        throw ParseError(Errc::Syntax, "unknown tree node kind '" + kind + "'");
    });
}

json to_json(const Host& host) {
    json vulns = json::array();
    for (const Vulnerability& v : host.vulnerabilities) vulns.push_back(to_json(v));
    json metrics{{"success_prob", host.success_prob},
                 {"impact", host.impact},
                 {"risk", host.risk}};
    // The unexploitable marker: never a raw float infinity on the wire.
    if (host.exploitable()) {
        metrics["attack_cost"] = host.attack_cost;
    } else {
        metrics["attack_cost"] = nullptr;
    }
    return json{{"id", host.id},
                {"os", host.os},
                {"running", host.running},
                {"vulnerabilities", std::move(vulns)},
                {"attack_tree", to_json(host.attack_tree)},
                {"metrics", std::move(metrics)}};
}

Host host_from_json(const json& j) {
    return guarded("host", [&] {
        Host host;
        host.id = field(j, "id").get<std::string>();
        host.os = field(j, "os").get<std::string>();
        host.running = field(j, "running").get<bool>();
        for (const json& v : field(j, "vulnerabilities")) {
            host.vulnerabilities.push_back(vulnerability_from_json(v));
        }
        host.attack_tree = attack_tree_from_json(field(j, "attack_tree"));
        host.attack_tree.validate(&host.vulnerabilities);
        // Folded metrics are derived state; recompute instead of trusting input.
        harm::FoldResult folded = harm::fold_attack_tree(host.attack_tree);
        host.success_prob = folded.success_prob;
        host.impact = folded.impact;
        host.attack_cost = folded.attack_cost;
        host.risk = host.success_prob * host.impact;
        return host;
    });
}

json to_json(const ReachabilityGraph& graph) {
    json nodes = json::array();
    for (const std::string& node : graph.nodes) nodes.push_back(node);
    json edges = json::array();
    for (const auto& [from, to] : graph.edges) edges.push_back(json::array({from, to}));
    return json{{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

ReachabilityGraph graph_from_json(const json& j) {
    return guarded("reachability_graph", [&] {
        ReachabilityGraph graph;
        for (const json& node : field(j, "nodes")) {
            graph.nodes.insert(node.get<std::string>());
        }
        for (const json& edge : field(j, "edges")) {
            if (!edge.is_array() || edge.size() != 2) {
                throw ParseError(Errc::Syntax, "edge must be a [from, to] pair");
            }
            graph.add_edge(edge[0].get<std::string>(), edge[1].get<std::string>());
        }
        graph.validate();
        return graph;
    });
}

json to_json(const Harm& harm) {
    json hosts = json::array();
    for (const auto& [id, host] : harm.hosts) hosts.push_back(to_json(host));
    return json{{"upper", to_json(harm.upper)}, {"hosts", std::move(hosts)}};
}

Harm harm_from_json(const json& j) {
    return guarded("harm", [&] {
        Harm harm;
        harm.upper = graph_from_json(field(j, "upper"));
        for (const json& host_json : field(j, "hosts")) {
            Host host = host_from_json(host_json);
            harm.lower.emplace(host.id, host.attack_tree);
            harm.hosts.emplace(host.id, std::move(host));
        }
        harm.validate();
        return harm;
    });
}

json to_json(const AttackPath& path) {
    json j = json::array();
    for (const std::string& id : path.hosts) j.push_back(id);
    return j;
}

AttackPath attack_path_from_json(const json& j) {
    return guarded("attack_path", [&] {
        AttackPath path;
        for (const json& id : j) path.hosts.push_back(id.get<std::string>());
        if (path.hosts.empty()) {
            throw ParseError(Errc::Syntax, "attack path must not be empty");
        }
        std::set<std::string> seen(path.hosts.begin(), path.hosts.end());
        if (seen.size() != path.hosts.size()) {
            throw ParseError(Errc::Syntax, "attack path repeats a host");
        }
        return path;
    });
}

json to_json(const AttackPlan& plan) {
    json steps = json::array();
    for (const PlanStep& step : plan.steps) {
        json s{{"host_id", step.host_id}, {"vulnerability_id", step.vulnerability_id}};
        if (step.exploit_module) s["exploit_module"] = *step.exploit_module;
        steps.push_back(std::move(s));
    }
    return json{{"strategy", to_string(plan.strategy)},
                {"steps", std::move(steps)},
                {"source_path", to_json(plan.source_path)},
                {"provenance", json(plan.provenance)}};
}

AttackPlan attack_plan_from_json(const json& j) {
    return guarded("attack_plan", [&] {
        AttackPlan plan;
        const std::string strategy = field(j, "strategy").get<std::string>();
        auto parsed = strategy_from_string(strategy);
        if (!parsed) throw ParseError(Errc::Syntax, "unknown strategy '" + strategy + "'");
        plan.strategy = *parsed;
        for (const json& s : field(j, "steps")) {
            PlanStep step;
            step.host_id = field(s, "host_id").get<std::string>();
            step.vulnerability_id = field(s, "vulnerability_id").get<std::string>();
            if (s.contains("exploit_module") && !s["exploit_module"].is_null()) {
                step.exploit_module = s["exploit_module"].get<std::string>();
            }
            plan.steps.push_back(std::move(step));
        }
        plan.source_path = attack_path_from_json(field(j, "source_path"));
        if (j.contains("provenance")) {
            plan.provenance = j["provenance"].get<std::map<std::string, double>>();
        }
        if (plan.steps.size() != plan.source_path.hosts.size()) {
            throw ParseError(Errc::Syntax, "plan steps do not cover the source path");
        }
        for (std::size_t i = 0; i < plan.steps.size(); ++i) {
            if (plan.steps[i].host_id != plan.source_path.hosts[i]) {
                throw ParseError(Errc::Syntax, "plan step order diverges from source path");
            }
        }
        return plan;
    });
}

json to_json(const ReportEntry& entry) {
    json j{{"order_label", entry.order_label},
           {"host_id", entry.host_id},
           {"host_running", entry.host_running},
           {"host_exploited", entry.host_exploited},
           {"cve_id", entry.cve_id},
           {"exploit_used", entry.exploit_used},
           {"payload_used", entry.payload_used},
           {"associated_vulnerabilities", entry.associated_vulnerabilities}};
    if (entry.failure_reason) j["failure_reason"] = to_string(*entry.failure_reason);
    return j;
}

ReportEntry report_entry_from_json(const json& j) {
    return guarded("report_entry", [&] {
        ReportEntry entry;
        entry.order_label = field(j, "order_label").get<std::string>();
        entry.host_id = field(j, "host_id").get<std::string>();
        entry.host_running = field(j, "host_running").get<bool>();
        entry.host_exploited = field(j, "host_exploited").get<bool>();
        entry.cve_id = field(j, "cve_id").get<std::string>();
        entry.exploit_used = field(j, "exploit_used").get<std::string>();
        entry.payload_used = field(j, "payload_used").get<std::string>();
        entry.associated_vulnerabilities =
            field(j, "associated_vulnerabilities").get<std::vector<std::string>>();
        if (j.contains("failure_reason") && !j["failure_reason"].is_null()) {
            const std::string reason = j["failure_reason"].get<std::string>();
            auto parsed = failure_reason_from_string(reason);
            if (!parsed) throw ParseError(Errc::Syntax, "unknown failure reason '" + reason + "'");
            entry.failure_reason = *parsed;
        }
        return entry;
    });
}

json to_json(const AttackReport& report) {
    json entries = json::array();
    for (const ReportEntry& entry : report.entries) entries.push_back(to_json(entry));
    return json{{"attacker_id", report.attacker_id},
                {"total_exploited", report.total_exploited},
                {"entries", std::move(entries)}};
}

AttackReport attack_report_from_json(const json& j) {
    return guarded("attack_report", [&] {
        AttackReport report;
        report.attacker_id = field(j, "attacker_id").get<std::string>();
        report.total_exploited = field(j, "total_exploited").get<int>();
        for (const json& entry : field(j, "entries")) {
            report.entries.push_back(report_entry_from_json(entry));
        }
        report.validate();
        return report;
    });
}

json to_json(const MetricsReport& report) {
    return json{{"nas", report.nas},
                {"sp", report.sp},
                {"aim", report.aim},
                {"roa", report.roa},
                {"severity_pct",
                 json{{"high", report.severity_pct.high},
                      {"medium", report.severity_pct.medium},
                      {"low", report.severity_pct.low}}}};
}

MetricsReport metrics_report_from_json(const json& j) {
    return guarded("metrics_report", [&] {
        MetricsReport report;
        report.nas = field(j, "nas").get<int>();
        report.sp = field(j, "sp").get<int>();
        report.aim = field(j, "aim").get<double>();
        report.roa = field(j, "roa").get<double>();
        const json& pct = field(j, "severity_pct");
        report.severity_pct.high = field(pct, "high").get<double>();
        report.severity_pct.medium = field(pct, "medium").get<double>();
        report.severity_pct.low = field(pct, "low").get<double>();
        return report;
    });
}

json to_json(const ingest::NetworkSpecFile& spec) {
    json hosts = json::array();
    for (const ingest::SpecHost& h : spec.hosts) {
        hosts.push_back(json{{"id", h.id}, {"os", h.os}, {"running", h.running}});
    }
    return json{{"hosts", std::move(hosts)},
                {"target", spec.target},
                {"attacker_entry", spec.attacker_entry}};
}

ingest::NetworkSpecFile network_spec_from_json(const json& j) {
    return guarded("network_spec", [&] {
        ingest::NetworkSpecFile spec;
        for (const json& h : field(j, "hosts")) {
            ingest::SpecHost host;
            host.id = field(h, "id").get<std::string>();
            host.os = field(h, "os").get<std::string>();
            if (h.contains("running")) host.running = h["running"].get<bool>();
            spec.hosts.push_back(std::move(host));
        }
        spec.target = field(j, "target").get<std::string>();
        spec.attacker_entry = field(j, "attacker_entry").get<std::vector<std::string>>();
        return spec;
    });
}

json to_json(const ingest::ScanResultFile& scan) {
    json records = json::array();
    for (const ingest::ScanRecord& r : scan.records) {
        records.push_back(json{{"host_id", r.host_id},
                               {"vuln_name", r.vuln_name},
                               {"cve_id", r.cve_id ? json(*r.cve_id) : json(nullptr)},
                               {"cvss_bs", r.cvss_bs}});
    }
    return json{{"records", std::move(records)}};
}

ingest::ScanResultFile scan_results_from_json(const json& j) {
    return guarded("scan_results", [&] {
        ingest::ScanResultFile scan;
        for (const json& r : field(j, "records")) {
            ingest::ScanRecord record;
            record.host_id = field(r, "host_id").get<std::string>();
            record.vuln_name = field(r, "vuln_name").get<std::string>();
            if (r.contains("cve_id") && !r["cve_id"].is_null()) {
                record.cve_id = r["cve_id"].get<std::string>();
            }
            record.cvss_bs = field(r, "cvss_bs").get<double>();
            scan.records.push_back(std::move(record));
        }
        return scan;
    });
}

json to_json(const ingest::ReachabilityRulesFile& rules) {
    json rule_list = json::array();
    for (const ingest::ReachabilityRule& r : rules.rules) {
        rule_list.push_back(json{{"from", r.from}, {"to", r.to}});
    }
    return json{{"rules", std::move(rule_list)}, {"subnets", json(rules.subnets)}};
}

ingest::ReachabilityRulesFile rules_file_from_json(const json& j) {
    return guarded("reachability_rules", [&] {
        ingest::ReachabilityRulesFile rules;
        for (const json& r : field(j, "rules")) {
            rules.rules.push_back(
                {field(r, "from").get<std::string>(), field(r, "to").get<std::string>()});
        }
        if (j.contains("subnets") && !j["subnets"].is_null()) {
            rules.subnets =
                j["subnets"].get<std::map<std::string, std::vector<std::string>>>();
        }
        return rules;
    });
}

json to_json(const ingest::ExploitCatalogFile& catalog) {
    json entries = json::array();
    for (const ingest::CatalogEntry& e : catalog.entries) {
        entries.push_back(json{{"cve_id", e.cve_id},
                               {"exploit_module", e.exploit_module},
                               {"payload", e.payload}});
    }
    return json{{"entries", std::move(entries)}};
}

ingest::ExploitCatalogFile exploit_catalog_from_json(const json& j) {
    return guarded("exploit_catalog", [&] {
        ingest::ExploitCatalogFile catalog;
        for (const json& e : field(j, "entries")) {
            catalog.entries.push_back({field(e, "cve_id").get<std::string>(),
                                       field(e, "exploit_module").get<std::string>(),
                                       field(e, "payload").get<std::string>()});
        }
        return catalog;
    });
}

json to_json(const executor::SimOutcomePolicy& policy) {
    json overrides = json::object();
    for (const auto& [host, ov] : policy.per_host_overrides) {
        if (ov.kind == executor::HostOverride::Kind::ForceSucceed) {
            overrides[host] = json{{"action", "force_succeed"}};
        } else {
            overrides[host] = json{{"action", "force_fail"}, {"reason", to_string(ov.reason)}};
        }
    }
    json j{{"mode", policy.mode == executor::SimMode::Deterministic ? "deterministic" : "seeded"},
           {"per_host_overrides", std::move(overrides)}};
    if (policy.seed) j["seed"] = *policy.seed;
    return j;
}

executor::SimOutcomePolicy policy_from_json(const json& j) {
    return guarded("sim_policy", [&] {
        executor::SimOutcomePolicy policy;
        const std::string mode = field(j, "mode").get<std::string>();
        if (mode == "deterministic") {
            policy.mode = executor::SimMode::Deterministic;
        } else if (mode == "seeded") {
            policy.mode = executor::SimMode::Seeded;
        } else {
            throw ParseError(Errc::Syntax, "unknown simulation mode '" + mode + "'");
        }
        if (j.contains("seed") && !j["seed"].is_null()) {
            policy.seed = j["seed"].get<std::uint64_t>();
        }
        if (j.contains("per_host_overrides")) {
            for (const auto& [host, ov] : j["per_host_overrides"].items()) {
                executor::HostOverride entry;
                const std::string action = field(ov, "action").get<std::string>();
                if (action == "force_succeed") {
                    entry.kind = executor::HostOverride::Kind::ForceSucceed;
                } else if (action == "force_fail") {
                    entry.kind = executor::HostOverride::Kind::ForceFail;
                    const std::string reason = field(ov, "reason").get<std::string>();
                    auto parsed = failure_reason_from_string(reason);
                    if (!parsed) {
                        throw ParseError(Errc::Syntax, "unknown failure reason '" + reason + "'");
                    }
                    entry.reason = *parsed;
                } else {
                    throw ParseError(Errc::Syntax, "unknown override action '" + action + "'");
                }
                policy.per_host_overrides.emplace(host, entry);
            }
        }
        policy.validate();
        return policy;
    });
}

json to_json(const executor::CampaignResult& result) {
    json reports = json::array();
    for (const AttackReport& r : result.reports) reports.push_back(to_json(r));
    json plans = json::array();
    for (const AttackPlan& p : result.plans_tried) plans.push_back(to_json(p));
    return json{{"reports", std::move(reports)},
                {"plans_tried", std::move(plans)},
                {"goal_reached", result.goal_reached},
                {"total_elapsed_sec", result.total_elapsed.count()}};
}

executor::CampaignResult campaign_from_json(const json& j) {
    return guarded("campaign_result", [&] {
        executor::CampaignResult result;
        for (const json& r : field(j, "reports")) {
            result.reports.push_back(attack_report_from_json(r));
        }
        for (const json& p : field(j, "plans_tried")) {
            result.plans_tried.push_back(attack_plan_from_json(p));
        }
        result.goal_reached = field(j, "goal_reached").get<bool>();
        result.total_elapsed =
            std::chrono::duration<double>(field(j, "total_elapsed_sec").get<double>());
        return result;
    });
}

std::string network_spec_to_text(const ingest::NetworkSpecFile& spec) {
    std::string out;
    for (const ingest::SpecHost& h : spec.hosts) {
        out += "host|" + text_field(h.id) + "|" + text_field(h.os) + "|" +
               (h.running ? "up" : "down") + "\n";
    }
    out += "target|" + text_field(spec.target) + "\n";
    out += "entry";
    for (const std::string& id : spec.attacker_entry) out += "|" + text_field(id);
    out += "\n";
    return out;
}

std::string scan_results_to_text(const ingest::ScanResultFile& scan) {
    std::string out;
    for (const ingest::ScanRecord& r : scan.records) {
        out += "vuln|" + text_field(r.host_id) + "|" + text_field(r.vuln_name) + "|" +
               (r.cve_id ? text_field(*r.cve_id) : "-") + "|" + score_text(r.cvss_bs) + "\n";
    }
    return out;
}

std::string rules_file_to_text(const ingest::ReachabilityRulesFile& rules) {
    std::string out;
    for (const auto& [label, members] : rules.subnets) {
        out += "subnet|" + text_field(label);
        for (const std::string& member : members) out += "|" + text_field(member);
        out += "\n";
    }
    for (const ingest::ReachabilityRule& r : rules.rules) {
        out += "rule|" + text_field(r.from) + "|" + text_field(r.to) + "\n";
    }
    return out;
}

std::string exploit_catalog_to_text(const ingest::ExploitCatalogFile& catalog) {
    std::string out;
    for (const ingest::CatalogEntry& e : catalog.entries) {
        out += "exploit|" + text_field(e.cve_id) + "|" + text_field(e.exploit_module) + "|" +
               text_field(e.payload) + "\n";
    }
    return out;
}

}  // namespace harmkit::serialize
