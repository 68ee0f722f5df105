#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "harmkit/harm.hpp"
#include "harmkit/ingest.hpp"
#include "harmkit/model.hpp"

namespace testutil {

inline std::string fixture_text(const std::string& name) {
    std::filesystem::path path = std::filesystem::path(HARMKIT_FIXTURE_DIR) / name;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("missing fixture " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

struct CaseStudy {
    harmkit::ingest::NetworkSpecFile spec;
    harmkit::ingest::ScanResultFile scan;
    harmkit::ReachabilityGraph graph;
    harmkit::ingest::ExploitCatalogFile catalog;
    harmkit::Harm harm;
};

inline CaseStudy load_case_study() {
    CaseStudy cs;
    cs.spec = harmkit::ingest::parse_network_spec(fixture_text("casestudy/network.spec"));
    cs.scan = harmkit::ingest::parse_scan_results(fixture_text("casestudy/scan.results"), cs.spec);
    cs.graph = harmkit::ingest::parse_reachability_rules(
        fixture_text("casestudy/reachability.rules"), cs.spec);
    cs.catalog = harmkit::ingest::load_exploit_catalog(fixture_text("casestudy/exploits.catalog"));
    cs.harm = harmkit::harm::build_harm(cs.spec, cs.scan, cs.graph, &cs.catalog);
    return cs;
}

// The six case-study paths in the enumeration's lexicographic order.
inline std::vector<std::vector<std::string>> case_study_paths() {
    return {
        {"206.171.47.1", "206.171.47.3", "206.171.47.5", "206.171.47.7"},
        {"206.171.47.1", "206.171.47.3", "206.171.47.7"},
        {"206.171.47.1", "206.171.47.4", "206.171.47.6", "206.171.47.7"},
        {"206.171.47.1", "206.171.47.7"},
        {"206.171.47.2", "206.171.47.3", "206.171.47.5", "206.171.47.7"},
        {"206.171.47.2", "206.171.47.3", "206.171.47.7"},
    };
}

inline std::vector<std::vector<std::string>> hosts_of(
    const std::vector<harmkit::AttackPath>& paths) {
    std::vector<std::vector<std::string>> out;
    for (const harmkit::AttackPath& p : paths) out.push_back(p.hosts);
    return out;
}

}  // namespace testutil
