#include "doctest.h"

#include <cmath>
#include <random>

#include "harmkit/harm.hpp"
#include "harmkit/serialize.hpp"

#include "generators.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace harmkit;
using harmkit::harm::TraversalPolicy;

namespace {

Vulnerability cve(const std::string& id, double bs) {
    return Vulnerability::make(id, "name of " + id, bs, true);
}

}  // namespace

TEST_CASE("case-study model: 8 upper nodes, 7 lower trees, folded metrics") {
    testutil::CaseStudy cs = testutil::load_case_study();
    CHECK(cs.harm.upper.nodes.size() == 8);
    CHECK(cs.harm.lower.size() == 7);
    CHECK(cs.harm.hosts.size() == 7);

    // Two findings (10.0 and 2.6): the best one dominates each metric.
    const Host& h1 = cs.harm.host("206.171.47.1");
    CHECK(h1.success_prob == 1.0);
    CHECK(h1.impact == 10.0);
    CHECK(h1.attack_cost == 1.0);
    CHECK(h1.risk == 10.0);
    CHECK(h1.vulnerabilities.size() == 2);
    REQUIRE(h1.find_vulnerability("CVE-2017-0143") != nullptr);
    CHECK(h1.find_vulnerability("CVE-2017-0143")->exploit_module ==
          "exploit/windows/smb/ms17_010_eternalblue");

    // A single low finding.
    const Host& h2 = cs.harm.host("206.171.47.2");
    CHECK(h2.success_prob == doctest::Approx(0.26).epsilon(1e-12));
    CHECK(h2.impact == 2.6);
    CHECK(h2.attack_cost == doctest::Approx(7.4).epsilon(1e-12));
    CHECK(h2.risk == doctest::Approx(0.676).epsilon(1e-12));
    CHECK_FALSE(h2.has_executable_vuln());
}

TEST_CASE("a host with no findings becomes the unexploitable marker") {
    ingest::NetworkSpecFile spec = ingest::parse_network_spec("host|a|os\ntarget|a\nentry|a\n");
    ingest::ScanResultFile scan;
    ReachabilityGraph g = ingest::parse_reachability_rules("rule|attacker|a\n", spec);
    Harm model = harm::build_harm(spec, scan, g);
    const Host& a = model.host("a");
    CHECK_FALSE(a.exploitable());
    CHECK(a.attack_tree.is_empty());
    CHECK(a.success_prob == 0.0);
    CHECK(a.impact == 0.0);
    CHECK(a.risk == 0.0);
    CHECK(std::isinf(a.attack_cost));
}

TEST_CASE("build rejects a host set that disagrees with the graph") {
    ingest::NetworkSpecFile spec = ingest::parse_network_spec("host|a|os\ntarget|a\nentry|a\n");
    ingest::NetworkSpecFile other =
        ingest::parse_network_spec("host|a|os\nhost|b|os\ntarget|a\nentry|a\n");
    ReachabilityGraph g = ingest::parse_reachability_rules("rule|attacker|a\n", other);
    ingest::ScanResultFile scan;
    CHECK_THROWS_AS(harm::build_harm(spec, scan, g), HarmkitError);
}

TEST_CASE("fold rules: leaves, OR, AND, empty") {
    AttackTreeNode leaf = AttackTreeNode::leaf(cve("CVE-1", 2.6));
    harm::FoldResult f = harm::fold_attack_tree(leaf);
    CHECK(f.success_prob == doctest::Approx(0.26).epsilon(1e-12));
    CHECK(f.impact == 2.6);
    CHECK(f.attack_cost == doctest::Approx(7.4).epsilon(1e-12));

    AttackTreeNode both = AttackTreeNode::or_gate(
        {AttackTreeNode::leaf(cve("CVE-1", 10.0)), AttackTreeNode::leaf(cve("CVE-2", 2.6))});
    f = harm::fold_attack_tree(both);
    CHECK(f.success_prob == 1.0);
    CHECK(f.impact == 10.0);
    CHECK(f.attack_cost == 1.0);

    AttackTreeNode chained = AttackTreeNode::and_gate(
        {AttackTreeNode::leaf(cve("CVE-1", 5.0)), AttackTreeNode::leaf(cve("CVE-2", 5.0))});
    f = harm::fold_attack_tree(chained);
    CHECK(f.success_prob == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(f.impact == 10.0);
    CHECK(f.attack_cost == 10.0);

    f = harm::fold_attack_tree(AttackTreeNode::empty());
    CHECK(f.success_prob == 0.0);
    CHECK(std::isinf(f.attack_cost));
}

TEST_CASE("raising a leaf score never hurts the attacker in an OR tree") {
    std::mt19937_64 rng(7);
    for (int round = 0; round < 200; ++round) {
        int leaves = 1 + static_cast<int>(rng() % 5);
        std::vector<double> scores;
        std::vector<AttackTreeNode> nodes;
        for (int i = 0; i < leaves; ++i) {
            scores.push_back(static_cast<double>(rng() % 101) / 10.0);
            nodes.push_back(AttackTreeNode::leaf(cve("CVE-" + std::to_string(i), scores.back())));
        }
        harm::FoldResult before = harm::fold_attack_tree(AttackTreeNode::or_gate(nodes));

        int bump = static_cast<int>(rng() % leaves);
        double bumped = std::min(10.0, scores[bump] + static_cast<double>(rng() % 30) / 10.0);
        nodes[bump] = AttackTreeNode::leaf(cve("CVE-" + std::to_string(bump), bumped));
        harm::FoldResult after = harm::fold_attack_tree(AttackTreeNode::or_gate(nodes));

        CHECK(after.success_prob >= before.success_prob);
        CHECK(after.impact >= before.impact);
        CHECK(after.attack_cost <= before.attack_cost);
    }
}

TEST_CASE("case-study enumeration is exactly the six known paths, in order") {
    testutil::CaseStudy cs = testutil::load_case_study();
    std::vector<AttackPath> paths = harm::enumerate_attack_paths(cs.harm, "206.171.47.7");
    CHECK(testutil::hosts_of(paths) == testutil::case_study_paths());
}

TEST_CASE("linear chain and diamond shapes") {
    ingest::NetworkSpecFile spec =
        ingest::parse_network_spec("host|a|os\nhost|b|os\nhost|t|os\ntarget|t\nentry|a\n");
    ingest::ScanResultFile scan = ingest::parse_scan_results(
        "vuln|a|x|CVE-1|5.0\nvuln|b|x|CVE-2|5.0\nvuln|t|x|CVE-3|5.0\n", spec);

    ReachabilityGraph chain =
        ingest::parse_reachability_rules("rule|attacker|a\nrule|a|t\n", spec);
    Harm model = harm::build_harm(spec, scan, chain);
    CHECK(testutil::hosts_of(harm::enumerate_attack_paths(model, "t")) ==
          std::vector<std::vector<std::string>>{{"a", "t"}});

    ReachabilityGraph diamond = ingest::parse_reachability_rules(
        "rule|attacker|a|b\nrule|a|t\nrule|b|t\n", spec);
    model = harm::build_harm(spec, scan, diamond);
    CHECK(testutil::hosts_of(harm::enumerate_attack_paths(model, "t")) ==
          std::vector<std::vector<std::string>>{{"a", "t"}, {"b", "t"}});
}

TEST_CASE("strict traversal drops the CVE-less stepping stones") {
    testutil::CaseStudy cs = testutil::load_case_study();
    harm::EnumerateOptions strict;
    strict.policy = TraversalPolicy::RequireExploit;
    std::vector<AttackPath> paths =
        harm::enumerate_attack_paths(cs.harm, "206.171.47.7", strict);
    // .2 and .6 only carry the CVE-less TCP-timestamps finding.
    CHECK(testutil::hosts_of(paths) == std::vector<std::vector<std::string>>{
                                           {"206.171.47.1", "206.171.47.3", "206.171.47.5",
                                            "206.171.47.7"},
                                           {"206.171.47.1", "206.171.47.3", "206.171.47.7"},
                                           {"206.171.47.1", "206.171.47.7"}});
}

TEST_CASE("hosts with no findings never appear inside a path") {
    ingest::NetworkSpecFile spec =
        ingest::parse_network_spec("host|a|os\nhost|bare|os\nhost|t|os\ntarget|t\nentry|a\n");
    ingest::ScanResultFile scan =
        ingest::parse_scan_results("vuln|a|x|CVE-1|5.0\nvuln|t|x|CVE-3|5.0\n", spec);
    ReachabilityGraph g = ingest::parse_reachability_rules(
        "rule|attacker|a\nrule|a|bare\nrule|bare|t\nrule|a|t\n", spec);
    Harm model = harm::build_harm(spec, scan, g);
    std::vector<AttackPath> paths = harm::enumerate_attack_paths(model, "t");
    CHECK(testutil::hosts_of(paths) == std::vector<std::vector<std::string>>{{"a", "t"}});
}

TEST_CASE("target handling: unknown, unexploitable, explicitly allowed") {
    ingest::NetworkSpecFile spec =
        ingest::parse_network_spec("host|a|os\nhost|t|os\ntarget|t\nentry|a\n");
    ingest::ScanResultFile scan = ingest::parse_scan_results("vuln|a|x|CVE-1|5.0\n", spec);
    ReachabilityGraph g = ingest::parse_reachability_rules("rule|attacker|a\nrule|a|t\n", spec);
    Harm model = harm::build_harm(spec, scan, g);

    CHECK_THROWS_AS(harm::enumerate_attack_paths(model, "nope"), HarmkitError);
    CHECK_THROWS_AS(harm::enumerate_attack_paths(model, "t"), HarmkitError);

    harm::EnumerateOptions allow;
    allow.allow_unexploitable_target = true;
    CHECK(harm::enumerate_attack_paths(model, "t", allow).size() == 1);
}

TEST_CASE("path cap aborts loudly") {
    testutil::CaseStudy cs = testutil::load_case_study();
    harm::EnumerateOptions capped;
    capped.max_paths = 2;
    CHECK_THROWS_AS(harm::enumerate_attack_paths(cs.harm, "206.171.47.7", capped), HarmkitError);
}

TEST_CASE("enumeration equals the brute-force oracle on random networks") {
    std::mt19937_64 rng(1234);
    for (int round = 0; round < 80; ++round) {
        testgen::SynthNet net = testgen::make_random_network(rng);
        for (TraversalPolicy policy :
             {TraversalPolicy::Fidelity, TraversalPolicy::RequireExploit}) {
            oracle::RawHosts raw = oracle::raw_hosts(net.spec, net.scan);
            if (!oracle::raw_traversable(raw.at(net.target), policy)) continue;
            harm::EnumerateOptions opts;
            opts.policy = policy;
            std::vector<AttackPath> got =
                harm::enumerate_attack_paths(net.harm, net.target, opts);
            CHECK(testutil::hosts_of(got) == oracle::all_paths(net.graph, raw, net.target, policy));
        }
    }
}

TEST_CASE("adding an edge never removes a path") {
    std::mt19937_64 rng(99);
    for (int round = 0; round < 40; ++round) {
        testgen::SynthNet net = testgen::make_random_network(rng);
        std::vector<AttackPath> before = harm::enumerate_attack_paths(net.harm, net.target);

        // Pick a missing host-to-host edge, if any remain.
        std::vector<std::pair<std::string, std::string>> missing;
        for (const auto& from : net.spec.hosts) {
            for (const auto& to : net.spec.hosts) {
                if (from.id != to.id && !net.harm.upper.has_edge(from.id, to.id)) {
                    missing.push_back({from.id, to.id});
                }
            }
        }
        if (missing.empty()) continue;
        auto edge = missing[rng() % missing.size()];
        Harm extended = net.harm;
        extended.upper.add_edge(edge.first, edge.second);

        std::vector<AttackPath> after = harm::enumerate_attack_paths(extended, net.target);
        std::set<std::vector<std::string>> after_set;
        for (const AttackPath& p : after) after_set.insert(p.hosts);
        for (const AttackPath& p : before) CHECK(after_set.count(p.hosts) == 1);
    }
}

TEST_CASE("dot export lists every node and edge") {
    testutil::CaseStudy cs = testutil::load_case_study();
    std::string dot = harm::to_dot(cs.harm);
    CHECK(dot.find("digraph harm") != std::string::npos);
    CHECK(dot.find("\"attacker\" [shape=diamond]") != std::string::npos);
    CHECK(dot.find("\"206.171.47.1\" -> \"206.171.47.7\"") != std::string::npos);
    CHECK(dot.find("p=1.00 aim=10.00 r=10.00 ac=1.00") != std::string::npos);
}

TEST_CASE("100-host synthetic builds keep their shape") {
    testgen::SynthNet flat = testgen::make_flat_network(100, 3);
    CHECK(flat.harm.upper.nodes.size() == 101);
    CHECK(flat.harm.hosts.size() == 100);

    testgen::SynthNet tiered = testgen::make_three_tier_network(100);
    CHECK(tiered.harm.upper.nodes.size() == 101);
    // attacker->tier1 + tier1->tier2 + tier2->tier3
    CHECK(tiered.harm.upper.edges.size() == 34u + 34u * 33u + 33u * 33u);
}
