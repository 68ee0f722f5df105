#include "doctest.h"

#include <random>

#include "harmkit/harm.hpp"
#include "harmkit/metrics.hpp"

#include "generators.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace harmkit;

namespace {

AttackPath path_of(std::vector<std::string> hosts) {
    AttackPath p;
    p.hosts = std::move(hosts);
    return p;
}

}  // namespace

TEST_CASE("shortest path metric over the case study is 2") {
    testutil::CaseStudy cs = testutil::load_case_study();
    std::vector<AttackPath> paths = harm::enumerate_attack_paths(cs.harm, "206.171.47.7");
    CHECK(metrics::shortest_path_metric(paths) == 2);
    CHECK(metrics::nas(paths) == 6);
    CHECK(metrics::shortest_path_metric({path_of({"a"})}) == 1);
    CHECK_THROWS_AS(metrics::shortest_path_metric({}), NoPathError);
}

TEST_CASE("path risk, probability, roa and impact on the plan path") {
    testutil::CaseStudy cs = testutil::load_case_study();
    AttackPath ap4 = path_of({"206.171.47.1", "206.171.47.7"});
    CHECK(metrics::path_risk(ap4, cs.harm) == 20.0);
    CHECK(metrics::path_probability(ap4, cs.harm) == 1.0);
    CHECK(metrics::path_roa(ap4, cs.harm) == 20.0);
    CHECK(metrics::path_impact(ap4, cs.harm) == 20.0);
}

TEST_CASE("zero-probability hosts zero out risk and probability") {
    ingest::NetworkSpecFile spec = ingest::parse_network_spec("host|a|os\ntarget|a\nentry|a\n");
    ingest::ScanResultFile scan = ingest::parse_scan_results("vuln|a|x|-|0.0\n", spec);
    ReachabilityGraph g = ingest::parse_reachability_rules("rule|attacker|a\n", spec);
    Harm model = harm::build_harm(spec, scan, g);
    AttackPath p = path_of({"a"});
    CHECK(metrics::path_risk(p, model) == 0.0);
    CHECK(metrics::path_probability(p, model) == 0.0);
    CHECK(metrics::path_roa(p, model) == 0.0);

    // Any p=0 host on a longer path absorbs the product.
    testutil::CaseStudy cs = testutil::load_case_study();
    AttackPath ap5 = path_of(
        {"206.171.47.1", "206.171.47.4", "206.171.47.6", "206.171.47.7"});
    CHECK(metrics::path_probability(ap5, cs.harm) ==
          doctest::Approx(0.26).epsilon(1e-12));  // .6 only has the 2.6 finding
}

TEST_CASE("max path probability ties break to the shorter then smaller path") {
    testutil::CaseStudy cs = testutil::load_case_study();
    std::vector<AttackPath> paths = harm::enumerate_attack_paths(cs.harm, "206.171.47.7");
    auto [probability, best] = metrics::max_path_probability(paths, cs.harm);
    CHECK(probability == 1.0);
    CHECK(best.hosts == std::vector<std::string>{"206.171.47.1", "206.171.47.7"});
    CHECK_THROWS_AS(metrics::max_path_probability({}, cs.harm), NoPathError);
}

TEST_CASE("roa refuses paths through hosts with nothing to exploit") {
    ingest::NetworkSpecFile spec =
        ingest::parse_network_spec("host|a|os\nhost|t|os\ntarget|t\nentry|a\n");
    ingest::ScanResultFile scan = ingest::parse_scan_results("vuln|t|x|CVE-1|5.0\n", spec);
    ReachabilityGraph g = ingest::parse_reachability_rules("rule|attacker|a\nrule|a|t\n", spec);
    Harm model = harm::build_harm(spec, scan, g);
    CHECK_THROWS_AS(metrics::path_roa(path_of({"a", "t"}), model), HarmkitError);
}

TEST_CASE("network-level sums over the case study") {
    testutil::CaseStudy cs = testutil::load_case_study();
    std::vector<AttackPath> paths = harm::enumerate_attack_paths(cs.harm, "206.171.47.7");
    CHECK(metrics::network_impact(paths, cs.harm) == doctest::Approx(177.8).epsilon(1e-12));
    CHECK(metrics::network_roa(paths, cs.harm) ==
          doctest::Approx(170.27405405405405).epsilon(1e-12));
    CHECK(metrics::network_impact({}, cs.harm) == 0.0);
}

TEST_CASE("severity percentages: case study and degenerate cases") {
    testutil::CaseStudy cs = testutil::load_case_study();
    SeverityPercentages pct = metrics::severity_percentages(cs.scan);
    CHECK(pct.high == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(pct.medium == doctest::Approx(52.0).epsilon(1e-12));
    CHECK(pct.low == doctest::Approx(28.0).epsilon(1e-12));

    ingest::ScanResultFile single;
    single.records.push_back({"a", "x", std::string("CVE-1"), 9.0});
    pct = metrics::severity_percentages(single);
    CHECK(pct.high == 100.0);
    CHECK(pct.medium == 0.0);
    CHECK(pct.low == 0.0);

    ingest::ScanResultFile big;
    for (int i = 0; i < 1565; ++i) {
        big.records.push_back({"a", "x" + std::to_string(i), std::string("CVE-1"), 7.0});
    }
    pct = metrics::severity_percentages(big);
    CHECK(pct.high == 100.0);

    CHECK_THROWS_AS(metrics::severity_percentages({}), HarmkitError);
}

TEST_CASE("severity percentages always sum to 100") {
    std::mt19937_64 rng(11);
    for (int round = 0; round < 100; ++round) {
        testgen::SynthNet net = testgen::make_random_network(rng);
        if (net.scan.records.empty()) continue;
        SeverityPercentages pct = metrics::severity_percentages(net.scan);
        CHECK(pct.high + pct.medium + pct.low == doctest::Approx(100.0).epsilon(1e-9));
    }
}

TEST_CASE("summed metrics are linear under path concatenation") {
    testutil::CaseStudy cs = testutil::load_case_study();
    AttackPath whole = path_of({"206.171.47.1", "206.171.47.3", "206.171.47.5", "206.171.47.7"});
    AttackPath front = path_of({"206.171.47.1", "206.171.47.3"});
    AttackPath back = path_of({"206.171.47.5", "206.171.47.7"});
    CHECK(metrics::path_risk(whole, cs.harm) ==
          doctest::Approx(metrics::path_risk(front, cs.harm) + metrics::path_risk(back, cs.harm))
              .epsilon(1e-12));
    CHECK(metrics::path_impact(whole, cs.harm) ==
          doctest::Approx(metrics::path_impact(front, cs.harm) +
                          metrics::path_impact(back, cs.harm))
              .epsilon(1e-12));
    CHECK(metrics::path_roa(whole, cs.harm) ==
          doctest::Approx(metrics::path_roa(front, cs.harm) + metrics::path_roa(back, cs.harm))
              .epsilon(1e-12));
}

TEST_CASE("appending a host multiplies the probability by its p") {
    testutil::CaseStudy cs = testutil::load_case_study();
    AttackPath shorter = path_of({"206.171.47.2"});
    AttackPath longer = path_of({"206.171.47.2", "206.171.47.3"});
    // .3 has p = 1.0, so the product is unchanged.
    CHECK(metrics::path_probability(longer, cs.harm) ==
          metrics::path_probability(shorter, cs.harm));

    AttackPath with_weak = path_of({"206.171.47.1", "206.171.47.4", "206.171.47.6"});
    AttackPath without = path_of({"206.171.47.1", "206.171.47.4"});
    CHECK(metrics::path_probability(with_weak, cs.harm) <
          metrics::path_probability(without, cs.harm));
}

TEST_CASE("scaling every host impact scales AIM and risk, not the argmax") {
    testutil::CaseStudy cs = testutil::load_case_study();
    std::vector<AttackPath> paths = harm::enumerate_attack_paths(cs.harm, "206.171.47.7");
    double aim_before = metrics::network_impact(paths, cs.harm);
    auto [p_before, best_before] = metrics::max_path_probability(paths, cs.harm);

    const double k = 3.0;
    Harm scaled = cs.harm;
    for (auto& [id, host] : scaled.hosts) {
        host.impact *= k;
        host.risk = host.success_prob * host.impact;
    }
    CHECK(metrics::network_impact(paths, scaled) ==
          doctest::Approx(k * aim_before).epsilon(1e-12));
    for (const AttackPath& p : paths) {
        CHECK(metrics::path_risk(p, scaled) ==
              doctest::Approx(k * metrics::path_risk(p, cs.harm)).epsilon(1e-12));
    }
    auto [p_after, best_after] = metrics::max_path_probability(paths, scaled);
    CHECK(best_after.hosts == best_before.hosts);
    CHECK(p_after == p_before);
}

TEST_CASE("every metric matches naive recomputation on random networks") {
    std::mt19937_64 rng(4321);
    for (int round = 0; round < 80; ++round) {
        testgen::SynthNet net = testgen::make_random_network(rng);
        oracle::RawHosts raw = oracle::raw_hosts(net.spec, net.scan);
        std::vector<AttackPath> paths = harm::enumerate_attack_paths(net.harm, net.target);
        for (const AttackPath& p : paths) {
            CHECK(metrics::path_risk(p, net.harm) ==
                  doctest::Approx(oracle::path_risk(p.hosts, raw)).epsilon(1e-9));
            CHECK(metrics::path_probability(p, net.harm) ==
                  doctest::Approx(oracle::path_probability(p.hosts, raw)).epsilon(1e-9));
            CHECK(metrics::path_impact(p, net.harm) ==
                  doctest::Approx(oracle::path_impact(p.hosts, raw)).epsilon(1e-9));
            CHECK(metrics::path_roa(p, net.harm) ==
                  doctest::Approx(oracle::path_roa(p.hosts, raw)).epsilon(1e-9));
        }
        if (!paths.empty()) {
            auto hops = oracle::bfs_hops(net.graph, raw, net.target,
                                         harm::TraversalPolicy::Fidelity);
            REQUIRE(hops.has_value());
            CHECK(metrics::shortest_path_metric(paths) == *hops);
        }
    }
}

TEST_CASE("evaluate bundles the full report") {
    testutil::CaseStudy cs = testutil::load_case_study();
    std::vector<AttackPath> paths = harm::enumerate_attack_paths(cs.harm, "206.171.47.7");
    MetricsReport report = metrics::evaluate(cs.harm, paths, cs.scan);
    CHECK(report.nas == 6);
    CHECK(report.sp == 2);
    CHECK(report.aim == doctest::Approx(177.8).epsilon(1e-12));
    CHECK(report.severity_pct.medium == doctest::Approx(52.0).epsilon(1e-12));

    MetricsReport empty = metrics::evaluate(cs.harm, {}, cs.scan);
    CHECK(empty.nas == 0);
    CHECK(empty.sp == 0);
    CHECK(empty.aim == 0.0);
}
