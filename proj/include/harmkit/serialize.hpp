#pragma once

#include <string>

#include "json.hpp"

#include "harmkit/executor.hpp"
#include "harmkit/ingest.hpp"
#include "harmkit/model.hpp"

namespace harmkit::serialize {

using json = nlohmann::json;

// Wraps nlohmann parse failures in a ParseError.
json parse_json(const std::string& text);

// Canonical dump: sorted keys (map-backed objects), two-space indent,
// trailing newline. Identical values always produce identical bytes.
std::string dump(const json& j);

json to_json(const Vulnerability& v);
Vulnerability vulnerability_from_json(const json& j);

json to_json(const AttackTreeNode& node);
AttackTreeNode attack_tree_from_json(const json& j);

json to_json(const Host& host);
Host host_from_json(const json& j);

json to_json(const ReachabilityGraph& graph);
ReachabilityGraph graph_from_json(const json& j);

json to_json(const Harm& harm);
Harm harm_from_json(const json& j);

json to_json(const AttackPath& path);
AttackPath attack_path_from_json(const json& j);

json to_json(const AttackPlan& plan);
AttackPlan attack_plan_from_json(const json& j);

json to_json(const ReportEntry& entry);
ReportEntry report_entry_from_json(const json& j);

json to_json(const AttackReport& report);
AttackReport attack_report_from_json(const json& j);

json to_json(const MetricsReport& report);
MetricsReport metrics_report_from_json(const json& j);

json to_json(const ingest::NetworkSpecFile& spec);
ingest::NetworkSpecFile network_spec_from_json(const json& j);

json to_json(const ingest::ScanResultFile& scan);
ingest::ScanResultFile scan_results_from_json(const json& j);

json to_json(const ingest::ReachabilityRulesFile& rules);
ingest::ReachabilityRulesFile rules_file_from_json(const json& j);

json to_json(const ingest::ExploitCatalogFile& catalog);
ingest::ExploitCatalogFile exploit_catalog_from_json(const json& j);

json to_json(const executor::SimOutcomePolicy& policy);
executor::SimOutcomePolicy policy_from_json(const json& j);

json to_json(const executor::CampaignResult& result);
executor::CampaignResult campaign_from_json(const json& j);

// Line-oriented renderings of the four input files (see docs/formats.md).
// Field values must not contain the '|' delimiter or newlines.
std::string network_spec_to_text(const ingest::NetworkSpecFile& spec);
std::string scan_results_to_text(const ingest::ScanResultFile& scan);
std::string rules_file_to_text(const ingest::ReachabilityRulesFile& rules);
std::string exploit_catalog_to_text(const ingest::ExploitCatalogFile& catalog);

}  // namespace harmkit::serialize
