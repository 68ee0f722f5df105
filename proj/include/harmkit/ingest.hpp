#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "harmkit/model.hpp"

namespace harmkit::ingest {

// The four normalized input files. Each has a line-oriented text form
// (see docs/formats.md) and an equivalent JSON form; parsers accept both.

struct SpecHost {
    std::string id;
    std::string os;
    bool running = true;
};

struct NetworkSpecFile {
    std::vector<SpecHost> hosts;
    std::string target;
    std::vector<std::string> attacker_entry;

    bool has_host(const std::string& id) const;
};

struct ScanRecord {
    std::string host_id;
    std::string vuln_name;
    std::optional<std::string> cve_id;
    double cvss_bs = 0.0;

    bool executable() const { return cve_id.has_value(); }
    // Identity used everywhere downstream: the CVE when known, else the name.
    const std::string& vuln_id() const { return cve_id ? *cve_id : vuln_name; }
};

struct ScanResultFile {
    std::vector<ScanRecord> records;

    int executable_count() const;
    int flagged_count() const;  // records without a CVE id (metrics-only)
};

struct ReachabilityRule {
    std::string from;  // host id, subnet label, "attacker" or "All"
    std::string to;    // host id or subnet label
};

struct ReachabilityRulesFile {
    std::vector<ReachabilityRule> rules;
    std::map<std::string, std::vector<std::string>> subnets;
};

struct CatalogEntry {
    std::string cve_id;
    std::string exploit_module;
    std::string payload;
};

struct ExploitCatalogFile {
    std::vector<CatalogEntry> entries;

    const CatalogEntry* find(const std::string& cve_id) const;
    // All catalog ids bound to the given module, sorted.
    std::vector<std::string> ids_sharing_module(const std::string& exploit_module) const;
};

NetworkSpecFile parse_network_spec(const std::string& text);

ScanResultFile parse_scan_results(const std::string& text, const NetworkSpecFile& spec);

ReachabilityRulesFile parse_rules_file(const std::string& text);

// Expands subnet-level and "All" rules into the concrete edge set. Every
// spec host becomes a node even when no rule mentions it.
ReachabilityGraph expand_rules(const ReachabilityRulesFile& rules, const NetworkSpecFile& spec);

ReachabilityGraph parse_reachability_rules(const std::string& text, const NetworkSpecFile& spec);

ExploitCatalogFile load_exploit_catalog(const std::string& text);

}  // namespace harmkit::ingest
