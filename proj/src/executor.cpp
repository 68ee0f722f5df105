#include "harmkit/executor.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <random>
#include <sstream>

#include "harmkit/planner.hpp"
#include "harmkit/serialize.hpp"

namespace harmkit::executor {
namespace {

std::string order_label(std::size_t index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "Host %03zu", index + 1);
    return buf;
}

std::string make_uuid4(std::mt19937_64& rng) {
    std::uniform_int_distribution<std::uint64_t> dist;
    std::uint64_t hi = dist(rng);
    std::uint64_t lo = dist(rng);
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%08" PRIx32 "-%04" PRIx16 "-%04" PRIx16 "-%04" PRIx16
                                    "-%012" PRIx64,
                  static_cast<std::uint32_t>(hi >> 32), static_cast<std::uint16_t>(hi >> 16),
                  static_cast<std::uint16_t>((hi & 0x0fffu) | 0x4000u),
                  static_cast<std::uint16_t>(((lo >> 48) & 0x3fffu) | 0x8000u),
                  static_cast<std::uint64_t>(lo & 0xffffffffffffull));
    return buf;
}

const char* bool_text(bool value) { return value ? "true" : "false"; }

}  // namespace

void SimOutcomePolicy::validate() const {
    if (mode == SimMode::Seeded && !seed.has_value()) {
        throw HarmkitError(Errc::Invariant, "seeded simulation needs a seed");
    }
}

ExploitBinding resolve_exploit(const Vulnerability& vuln,
                               const ingest::ExploitCatalogFile& catalog) {
    if (!vuln.executable) {
        throw HarmkitError(Errc::NotExecutable,
                          "finding '" + vuln.id + "' has no CVE id to search for");
    }
    const ingest::CatalogEntry* entry = catalog.find(vuln.id);
    if (entry == nullptr) {
        throw HarmkitError(Errc::ExploitNotFound, "no exploit module for '" + vuln.id + "'");
    }
    return {entry->exploit_module, entry->payload};
}

AttackReport execute_plan(const AttackPlan& plan, const Harm& harm,
                          const ingest::ExploitCatalogFile& catalog,
                          const SimOutcomePolicy& policy, const std::string& attacker_id) {
    plan.validate_against(harm);
    policy.validate();

    std::optional<std::mt19937_64> rng;
    if (policy.mode == SimMode::Seeded) rng.emplace(*policy.seed);
    auto draw_success = [&](double probability) {
        if (!rng) return true;
        return std::uniform_real_distribution<double>(0.0, 1.0)(*rng) < probability;
    };

    AttackReport report;
    report.attacker_id = attacker_id;

    for (std::size_t i = 0; i < plan.steps.size(); ++i) {
        const PlanStep& step = plan.steps[i];
        const Host& host = harm.host(step.host_id);
        const Vulnerability* vuln = host.find_vulnerability(step.vulnerability_id);
        const ingest::CatalogEntry* binding =
            vuln->executable ? catalog.find(vuln->id) : nullptr;

        ReportEntry entry;
        entry.order_label = order_label(i);
        entry.host_id = host.id;
        entry.host_running = host.running;
        entry.cve_id = step.vulnerability_id;

        std::optional<FailureReason> failure;
        auto override_it = policy.per_host_overrides.find(host.id);
        if (override_it != policy.per_host_overrides.end()) {
            const HostOverride& ov = override_it->second;
            if (ov.kind == HostOverride::Kind::ForceFail) {
                failure = ov.reason;
                if (ov.reason == FailureReason::HostDown) entry.host_running = false;
            }
        } else if (!host.running) {
            failure = FailureReason::HostDown;
        } else if (vuln->executable && binding == nullptr) {
            failure = FailureReason::NotExploitable;
        } else if (!draw_success(vuln->success_prob)) {
            failure = FailureReason::NotExploitable;
        }

        entry.host_exploited = !failure.has_value();
        entry.failure_reason = failure;
        if (entry.host_exploited && binding != nullptr) {
            entry.exploit_used = binding->exploit_module;
            entry.payload_used = binding->payload;
            entry.associated_vulnerabilities = catalog.ids_sharing_module(binding->exploit_module);
        }

        bool stop = failure.has_value();
        if (entry.host_exploited) ++report.total_exploited;
        report.entries.push_back(std::move(entry));
        if (stop) break;  // later steps depend on this foothold
    }

    report.validate();
    return report;
}

CampaignResult run_campaign(const Harm& harm, const std::string& target, Strategy strategy,
                            const ingest::ExploitCatalogFile& catalog,
                            const SimOutcomePolicy& policy, const CampaignOptions& options) {
    if (options.max_replans < 0) {
        throw HarmkitError(Errc::Invariant, "max_replans must be non-negative");
    }
    harm.host(target);  // throws UnknownHost
    if (options.initial_plan && options.initial_plan->target() != target) {
        throw HarmkitError(Errc::Invariant, "initial plan does not end at the campaign target");
    }

    std::set<std::string> entries = options.entry_points;
    if (entries.empty()) {
        for (const std::string& id : harm.upper.successors(kAttackerNode)) entries.insert(id);
    }
    planner::PlanOptions plan_options;
    plan_options.policy = options.policy;

    auto start = std::chrono::steady_clock::now();
    CampaignResult result;
    planner::ExclusionSet excluded;

    for (int attempt = 0; attempt <= options.max_replans; ++attempt) {
        AttackPlan plan;
        if (attempt == 0 && options.initial_plan) {
            plan = *options.initial_plan;
            plan.validate_against(harm);
        } else {
            try {
                plan = planner::replan_after_failure(harm, target, strategy, excluded, entries,
                                                     plan_options);
            } catch (const NoPathError&) {
                break;
            } catch (const StuckError&) {
                break;
            }
        }

        result.plans_tried.push_back(plan);
        AttackReport report = execute_plan(plan, harm, catalog, policy, options.attacker_id);
        result.reports.push_back(report);

        const ReportEntry& last = report.entries.back();
        if (last.host_exploited && last.host_id == target) {
            result.goal_reached = true;
            break;
        }
        if (!last.failure_reason) break;  // fully exploited yet not the goal; nothing to exclude

        std::size_t before = excluded.size();
        switch (*last.failure_reason) {
            case FailureReason::HostDown:
                excluded.hosts.insert(last.host_id);
                break;
            case FailureReason::NotExploitable:
            case FailureReason::Timeout:
                excluded.host_vulnerabilities.insert({last.host_id, last.cve_id});
                break;
        }
        if (excluded.size() == before) break;  // no new information; replanning would loop
    }

    result.total_elapsed = std::chrono::steady_clock::now() - start;
    return result;
}

std::string emit_resource_script(const AttackPlan& plan,
                                 const ingest::ExploitCatalogFile& catalog) {
    for (const PlanStep& step : plan.steps) {
        if (catalog.find(step.vulnerability_id) == nullptr) {
            throw HarmkitError(Errc::UnresolvedStep,
                              "step on " + step.host_id + " binds '" + step.vulnerability_id +
                                  "' which no catalog entry resolves");
        }
    }

    std::mt19937_64 rng(std::random_device{}());
    std::ostringstream out;
    for (const PlanStep& step : plan.steps) {
        const ingest::CatalogEntry* entry = catalog.find(step.vulnerability_id);
        out << "# target host to exploit: " << step.host_id << "\n";
        out << "current_host = '" << step.host_id << "'\n";
        out << "succeed_signal = '" << make_uuid4(rng) << "'\n";
        out << "fail_signal = '" << make_uuid4(rng) << "'\n";
        out << "run_single('use " << entry->exploit_module << "')\n";
        out << "run_single('set RHOST " << step.host_id << "')\n";
        out << "run_single('set PAYLOAD " << entry->payload << "')\n";
        out << "run_single('exploit -J -z')\n";
        out << "newest_session_id = framework.sessions.keys.max\n";
        out << "if framework.sessions[newest_session_id].target_host == current_host\n";
        out << "  print_line succeed_signal\n";
        out << "else\n";
        out << "  print_line fail_signal\n";
        out << "end\n\n";
    }
    return out.str();
}

std::string generate_report(const CampaignResult& result) {
    return serialize::dump(serialize::to_json(result));
}

CampaignResult parse_report(const std::string& document) {
    return serialize::campaign_from_json(serialize::parse_json(document));
}

std::string render_report_text(const CampaignResult& result) {
    std::ostringstream out;
    out << "Attack Report\n";
    out << "  Goal reached: " << (result.goal_reached ? "yes" : "no") << "\n";
    out << "  Plans tried: " << result.plans_tried.size() << "\n";
    for (std::size_t i = 0; i < result.reports.size(); ++i) {
        const AttackReport& report = result.reports[i];
        out << "\nPlan " << (i + 1);
        if (i < result.plans_tried.size()) {
            out << " (" << to_string(result.plans_tried[i].strategy) << ")";
        }
        out << "\n";
        out << "  The attacker's (attacking host) ID: " << report.attacker_id << "\n";
        out << "  The total number of hosts exploited: " << report.total_exploited << "\n";
        for (const ReportEntry& entry : report.entries) {
            out << "  Order of exploit on path: " << entry.order_label << "\n";
            out << "    Host ID: " << entry.host_id << "\n";
            out << "    Host running: " << bool_text(entry.host_running) << "\n";
            out << "    Host exploited: " << bool_text(entry.host_exploited) << "\n";
            out << "    CVE ID: " << entry.cve_id << "\n";
            if (!entry.exploit_used.empty()) {
                out << "    Exploit used: \"" << entry.exploit_used << "\"\n";
                out << "    The payload used: \"" << entry.payload_used << "\"\n";
            }
            if (!entry.associated_vulnerabilities.empty()) {
                out << "    Vulnerabilities associated with attack type: ";
                for (std::size_t k = 0; k < entry.associated_vulnerabilities.size(); ++k) {
                    if (k != 0) out << ", ";
                    out << entry.associated_vulnerabilities[k];
                }
                out << "\n";
            }
            if (entry.failure_reason) {
                out << "    Failure reason: " << to_string(*entry.failure_reason) << "\n";
            }
        }
    }
    return out.str();
}

}  // namespace harmkit::executor
