#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "harmkit/harm.hpp"
#include "harmkit/ingest.hpp"
#include "harmkit/model.hpp"

namespace harmkit::executor {

enum class SimMode { Deterministic, Seeded };

struct HostOverride {
    enum class Kind { ForceSucceed, ForceFail };
    Kind kind = Kind::ForceFail;
    FailureReason reason = FailureReason::HostDown;  // ForceFail only
};

// Controls the simulated outcome of each exploitation step. Deterministic
// mode succeeds whenever the host is up and the exploit resolves; Seeded
// mode additionally draws success with the vulnerability's probability.
struct SimOutcomePolicy {
    SimMode mode = SimMode::Deterministic;
    std::optional<std::uint64_t> seed;
    std::map<std::string, HostOverride> per_host_overrides;

    void validate() const;  // Seeded requires a seed
};

struct ExploitBinding {
    std::string exploit_module;
    std::string payload;
};

struct CampaignResult {
    std::vector<AttackReport> reports;
    std::vector<AttackPlan> plans_tried;
    bool goal_reached = false;
    std::chrono::duration<double> total_elapsed{0.0};
};

struct CampaignOptions {
    int max_replans = 5;
    std::string attacker_id = "simulator";
    // Entry points for the incremental strategy; defaults to the attacker's
    // direct successors.
    std::set<std::string> entry_points;
    harm::TraversalPolicy policy = harm::TraversalPolicy::Fidelity;
    // When set, the first iteration executes this plan instead of planning.
    std::optional<AttackPlan> initial_plan;
};

// Catalog lookup for one finding. Throws NotExecutable for findings without
// a CVE id and ExploitNotFound when the catalog has no entry.
ExploitBinding resolve_exploit(const Vulnerability& vuln, const ingest::ExploitCatalogFile& catalog);

// Walks the plan in order and stops at the first failure. Failures are data
// in the report, never exceptions. Hosts whose bound finding has no CVE are
// treated as plain lateral movement and succeed when the host is up.
AttackReport execute_plan(const AttackPlan& plan, const Harm& harm,
                          const ingest::ExploitCatalogFile& catalog,
                          const SimOutcomePolicy& policy,
                          const std::string& attacker_id = "simulator");

// Plan/execute loop with failure feedback: a downed host is excluded
// outright, a failed exploit excludes that (host, vulnerability) pair, and
// the strategy replans until the goal is reached, no path remains, or the
// replan budget runs out.
CampaignResult run_campaign(const Harm& harm, const std::string& target, Strategy strategy,
                            const ingest::ExploitCatalogFile& catalog,
                            const SimOutcomePolicy& policy, const CampaignOptions& options = {});

// Renders the per-host exploitation script (inspection artifact only; this
// tool never executes it). Every step must resolve to a catalog entry.
// Success/failure signal UUIDs are freshly generated per emission.
std::string emit_resource_script(const AttackPlan& plan,
                                 const ingest::ExploitCatalogFile& catalog);

// Serializes a campaign to the machine-readable report document.
std::string generate_report(const CampaignResult& result);
CampaignResult parse_report(const std::string& document);

// Human-readable rendering of the same report.
std::string render_report_text(const CampaignResult& result);

}  // namespace harmkit::executor
