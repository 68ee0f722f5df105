#include "harmkit/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "harmkit/executor.hpp"
#include "harmkit/harm.hpp"
#include "harmkit/ingest.hpp"
#include "harmkit/metrics.hpp"
#include "harmkit/planner.hpp"
#include "harmkit/serialize.hpp"

namespace harmkit::cli {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw HarmkitError(Errc::Io, "cannot read '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw HarmkitError(Errc::Io, "cannot write '" + path.string() + "'");
    }
    out << content;
}

int exit_code_for(const HarmkitError& e) {
    switch (e.code()) {
        case Errc::InconsistentHostSet:
            return 3;
        case Errc::UnknownTarget:
        case Errc::UnknownHost:
        case Errc::UnexploitableHost:
            return 4;
        case Errc::NoPath:
        case Errc::Stuck:
            return 5;
        default:
            return 2;
    }
}

struct Bundle {
    ingest::NetworkSpecFile spec;
    ingest::ScanResultFile scan;
    ReachabilityGraph graph;
    ingest::ExploitCatalogFile catalog;
};

Bundle load_bundle(const fs::path& dir) {
    Bundle bundle;
    bundle.spec =
        serialize::network_spec_from_json(serialize::parse_json(read_file(dir / "network.json")));
    bundle.scan =
        serialize::scan_results_from_json(serialize::parse_json(read_file(dir / "scan.json")));
    bundle.graph =
        serialize::graph_from_json(serialize::parse_json(read_file(dir / "reachability.json")));
    bundle.catalog = serialize::exploit_catalog_from_json(
        serialize::parse_json(read_file(dir / "catalog.json")));
    return bundle;
}

// The built model is cached in the bundle as harm.json; commands fall back
// to building it in place when only the ingested files are present.
Harm load_or_build_harm(const Bundle& bundle, const fs::path& dir) {
    fs::path harm_path = dir / "harm.json";
    if (fs::exists(harm_path)) {
        return serialize::harm_from_json(serialize::parse_json(read_file(harm_path)));
    }
    return harm::build_harm(bundle.spec, bundle.scan, bundle.graph, &bundle.catalog);
}

struct CommonArgs {
    std::string bundle_dir;
    bool json = false;
    bool require_exploit_module = false;

    harm::TraversalPolicy policy() const {
        return require_exploit_module ? harm::TraversalPolicy::RequireExploit
                                      : harm::TraversalPolicy::Fidelity;
    }
};

int cmd_ingest(const CommonArgs& common, const std::string& network_path,
               const std::string& scan_path, const std::string& rules_path,
               const std::string& catalog_path, std::ostream& out, std::ostream& err) {
    ingest::NetworkSpecFile spec = ingest::parse_network_spec(read_file(network_path));

    auto scan_start = Clock::now();
    ingest::ScanResultFile scan = ingest::parse_scan_results(read_file(scan_path), spec);
    double scan_sec = seconds_since(scan_start);

    auto rules_start = Clock::now();
    ReachabilityGraph graph = ingest::parse_reachability_rules(read_file(rules_path), spec);
    double rules_sec = seconds_since(rules_start);

    ingest::ExploitCatalogFile catalog = ingest::load_exploit_catalog(read_file(catalog_path));

    fs::path dir(common.bundle_dir);
    fs::create_directories(dir);
    write_file(dir / "network.json", serialize::dump(serialize::to_json(spec)));
    write_file(dir / "scan.json", serialize::dump(serialize::to_json(scan)));
    write_file(dir / "reachability.json", serialize::dump(serialize::to_json(graph)));
    write_file(dir / "catalog.json", serialize::dump(serialize::to_json(catalog)));
    write_file(dir / "manifest.json",
               serialize::dump(serialize::json{{"format", "harmkit-bundle"}, {"version", 1}}));

    err << "Processing the vulnerabilities: " << scan_sec << " sec\n";
    err << "Processing security groups: " << rules_sec << " sec\n";

    if (common.json) {
        out << serialize::dump(
            serialize::json{{"bundle", dir.string()},
                            {"hosts", spec.hosts.size()},
                            {"records", scan.records.size()},
                            {"executable_records", scan.executable_count()},
                            {"edges", graph.edges.size()},
                            {"catalog_entries", catalog.entries.size()}});
    } else {
        out << "Bundle written to " << dir.string() << "\n";
        out << "  hosts: " << spec.hosts.size() << ", findings: " << scan.records.size() << " ("
            << scan.executable_count() << " with CVE), edges: " << graph.edges.size()
            << ", catalog entries: " << catalog.entries.size() << "\n";
    }
    return 0;
}

int cmd_build(const CommonArgs& common, const std::string& dot_path, std::ostream& out,
              std::ostream& err) {
    fs::path dir(common.bundle_dir);
    Bundle bundle = load_bundle(dir);

    auto start = Clock::now();
    Harm model = harm::build_harm(bundle.spec, bundle.scan, bundle.graph, &bundle.catalog);
    double build_sec = seconds_since(start);

    write_file(dir / "harm.json", serialize::dump(serialize::to_json(model)));
    if (!dot_path.empty()) write_file(dot_path, harm::to_dot(model));

    err << "HARM construction: " << build_sec << " sec\n";
    if (common.json) {
        out << serialize::dump(serialize::json{{"nodes", model.upper.nodes.size()},
                                               {"edges", model.upper.edges.size()},
                                               {"hosts", model.hosts.size()},
                                               {"harm", (dir / "harm.json").string()}});
    } else {
        out << "HARM built: " << model.upper.nodes.size() << " nodes, "
            << model.upper.edges.size() << " edges, " << model.hosts.size()
            << " lower-layer trees\n";
    }
    return 0;
}

int cmd_metrics(const CommonArgs& common, std::string target, std::ostream& out,
                std::ostream& err) {
    fs::path dir(common.bundle_dir);
    Bundle bundle = load_bundle(dir);
    Harm model = load_or_build_harm(bundle, dir);
    if (target.empty()) target = bundle.spec.target;
    if (model.hosts.count(target) == 0) {
        throw HarmkitError(Errc::UnknownTarget, "target '" + target + "' is not a host");
    }

    auto start = Clock::now();
    harm::EnumerateOptions opts;
    opts.policy = common.policy();
    std::vector<AttackPath> paths;
    try {
        paths = harm::enumerate_attack_paths(model, target, opts);
    } catch (const HarmkitError& e) {
        // A target nothing can exploit simply has zero attack scenarios.
        if (e.code() != Errc::UnexploitableHost) throw;
    }
    MetricsReport report = metrics::evaluate(model, paths, bundle.scan);
    double metrics_sec = seconds_since(start);

    write_file(dir / "metrics.json", serialize::dump(serialize::to_json(report)));
    err << "Security evaluation: " << metrics_sec << " sec\n";
    if (common.json) {
        serialize::json j = serialize::to_json(report);
        j["target"] = target;
        out << serialize::dump(j);
    } else {
        out << metrics::render_metrics_text(report, target);
    }
    return 0;
}

int cmd_plan(const CommonArgs& common, std::string target, const std::string& strategy_name,
             const std::vector<std::string>& entry, const std::string& out_path,
             std::ostream& out, std::ostream& err) {
    fs::path dir(common.bundle_dir);
    Bundle bundle = load_bundle(dir);
    Harm model = load_or_build_harm(bundle, dir);
    if (target.empty()) target = bundle.spec.target;
    if (model.hosts.count(target) == 0) {
        throw HarmkitError(Errc::UnknownTarget, "target '" + target + "' is not a host");
    }
    auto strategy = strategy_from_string(strategy_name);
    if (!strategy) {
        throw HarmkitError(Errc::Invariant, "unknown strategy '" + strategy_name + "'");
    }

    planner::PlanOptions options;
    options.policy = common.policy();

    auto start = Clock::now();
    AttackPlan plan;
    if (*strategy == Strategy::IncrementalCost) {
        std::set<std::string> entries(entry.begin(), entry.end());
        if (entries.empty()) {
            entries.insert(bundle.spec.attacker_entry.begin(), bundle.spec.attacker_entry.end());
        }
        plan = planner::plan_incremental_cost(model, entries, target, options);
    } else if (*strategy == Strategy::ShortestPath) {
        plan = planner::plan_shortest_path(model, target, options);
    } else {
        plan = planner::plan_composite_probability(model, target, options);
    }
    double plan_sec = seconds_since(start);

    fs::path plan_path = out_path.empty() ? dir / "plan.json" : fs::path(out_path);
    write_file(plan_path, serialize::dump(serialize::to_json(plan)));

    err << "Attack plan (" << to_string(plan.strategy) << "): " << plan_sec << " sec\n";
    if (common.json) {
        out << serialize::dump(serialize::to_json(plan));
    } else {
        out << "Attack plan (" << to_string(plan.strategy) << "): attacker";
        for (const PlanStep& step : plan.steps) out << " -> " << step.host_id;
        out << "\n";
        for (const PlanStep& step : plan.steps) {
            out << "  " << step.host_id << ": " << step.vulnerability_id;
            if (step.exploit_module) out << " via " << *step.exploit_module;
            out << "\n";
        }
        out << "Plan written to " << plan_path.string() << "\n";
    }
    return 0;
}

int cmd_execute(const CommonArgs& common, const std::string& plan_path,
                const std::string& policy_path, int max_replans, const std::string& script_path,
                const std::string& attacker_id, const std::string& report_path,
                std::ostream& out, std::ostream& err) {
    fs::path dir(common.bundle_dir);
    Bundle bundle = load_bundle(dir);
    Harm model = load_or_build_harm(bundle, dir);

    fs::path plan_file = plan_path.empty() ? dir / "plan.json" : fs::path(plan_path);
    AttackPlan plan =
        serialize::attack_plan_from_json(serialize::parse_json(read_file(plan_file)));
    plan.validate_against(model);

    executor::SimOutcomePolicy policy;
    if (!policy_path.empty()) {
        policy = serialize::policy_from_json(serialize::parse_json(read_file(policy_path)));
    }

    executor::CampaignOptions options;
    options.max_replans = max_replans;
    options.attacker_id = attacker_id;
    options.policy = common.policy();
    options.initial_plan = plan;

    auto start = Clock::now();
    executor::CampaignResult result = executor::run_campaign(
        model, plan.target(), plan.strategy, bundle.catalog, policy, options);
    double exec_sec = seconds_since(start);

    fs::path report_file = report_path.empty() ? dir / "report.json" : fs::path(report_path);
    write_file(report_file, executor::generate_report(result));

    if (!script_path.empty() && !result.plans_tried.empty()) {
        try {
            write_file(script_path,
                       executor::emit_resource_script(result.plans_tried.back(), bundle.catalog));
        } catch (const HarmkitError& e) {
            if (e.code() != Errc::UnresolvedStep) throw;
            err << "resource script skipped: " << e.what() << "\n";
        }
    }

    err << "Attack execution: " << exec_sec << " sec\n";
    if (common.json) {
        out << executor::generate_report(result);
    } else {
        out << executor::render_report_text(result);
        out << "\nReport written to " << report_file.string() << "\n";
    }
    return result.goal_reached ? 0 : 6;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"harmkit: two-layer network attack modeling, planning and simulated execution"};
    app.require_subcommand(1);
    app.set_config("--config");

    CommonArgs common;

    auto add_bundle_option = [&](CLI::App* cmd) {
        cmd->add_option("--bundle", common.bundle_dir, "bundle directory")
            ->envname("HARMKIT_BUNDLE")
            ->required();
        cmd->add_flag("--json", common.json, "machine-readable output on stdout");
    };
    auto add_strict_flag = [&](CLI::App* cmd) {
        cmd->add_flag("--require-exploit-module", common.require_exploit_module,
                      "restrict traversal to hosts with CVE-bearing findings");
    };

    int rc = 0;

    std::string network_path;
    std::string scan_path;
    std::string rules_path;
    std::string catalog_path;
    CLI::App* ingest_cmd =
        app.add_subcommand("ingest", "parse the four input files into a validated bundle");
    ingest_cmd->add_option("--network", network_path, "network spec file")->required();
    ingest_cmd->add_option("--scan", scan_path, "scan results file")->required();
    ingest_cmd->add_option("--rules", rules_path, "reachability rules file")->required();
    ingest_cmd->add_option("--catalog", catalog_path, "exploit catalog file")->required();
    add_bundle_option(ingest_cmd);
    ingest_cmd->callback([&] {
        rc = cmd_ingest(common, network_path, scan_path, rules_path, catalog_path, out, err);
    });

    std::string dot_path;
    CLI::App* build_cmd = app.add_subcommand("build", "construct the two-layer model");
    add_bundle_option(build_cmd);
    build_cmd->add_option("--export-dot", dot_path, "also write a graphviz rendering");
    build_cmd->callback([&] { rc = cmd_build(common, dot_path, out, err); });

    std::string target;
    CLI::App* metrics_cmd = app.add_subcommand("metrics", "security evaluation for a target");
    add_bundle_option(metrics_cmd);
    metrics_cmd->add_option("--target", target, "target host (default: spec target)");
    add_strict_flag(metrics_cmd);
    metrics_cmd->callback([&] { rc = cmd_metrics(common, target, out, err); });

    std::string strategy_name = "shortest";
    std::vector<std::string> entry;
    std::string plan_out;
    CLI::App* plan_cmd = app.add_subcommand("plan", "generate an attack plan");
    add_bundle_option(plan_cmd);
    plan_cmd->add_option("--target", target, "target host (default: spec target)");
    plan_cmd->add_option("--strategy", strategy_name,
                         "shortest | composite | incremental (default shortest)");
    plan_cmd->add_option("--entry", entry, "entry hosts for the incremental strategy");
    plan_cmd->add_option("--out", plan_out, "plan output path (default <bundle>/plan.json)");
    add_strict_flag(plan_cmd);
    plan_cmd->callback(
        [&] { rc = cmd_plan(common, target, strategy_name, entry, plan_out, out, err); });

    std::string plan_path;
    std::string policy_path;
    std::string script_path;
    std::string report_path;
    std::string attacker_id = "simulator";
    int max_replans = 5;
    CLI::App* execute_cmd =
        app.add_subcommand("execute", "run the simulated campaign with replanning");
    add_bundle_option(execute_cmd);
    execute_cmd->add_option("--plan", plan_path, "plan file (default <bundle>/plan.json)");
    execute_cmd->add_option("--policy", policy_path, "simulated-outcome policy file");
    execute_cmd->add_option("--max-replans", max_replans, "replanning budget (default 5)");
    execute_cmd->add_option("--emit-script", script_path,
                            "write the resource script of the last plan tried");
    execute_cmd->add_option("--attacker-id", attacker_id, "attacking host id in the report");
    execute_cmd->add_option("--report", report_path,
                            "report output path (default <bundle>/report.json)");
    add_strict_flag(execute_cmd);
    execute_cmd->callback([&] {
        rc = cmd_execute(common, plan_path, policy_path, max_replans, script_path, attacker_id,
                         report_path, out, err);
    });

    std::vector<const char*> argv;
    argv.push_back("harmkit");
    for (const std::string& arg : args) argv.push_back(arg.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    } catch (const HarmkitError& e) {
        err << "error (" << errc_name(e.code()) << "): " << e.what() << "\n";
        return exit_code_for(e);
    }
    return rc;
}

}  // namespace harmkit::cli
