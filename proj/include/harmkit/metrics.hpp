#pragma once

#include <string>
#include <utility>
#include <vector>

#include "harmkit/ingest.hpp"
#include "harmkit/model.hpp"

namespace harmkit::metrics {

// Minimum path length over the set. Throws NoPathError on an empty set.
int shortest_path_metric(const std::vector<AttackPath>& paths);

// Expected impact along a path: sum of p_h * aim_h over its hosts.
double path_risk(const AttackPath& path, const Harm& harm);

// Probability that every hop on the path succeeds: product of host p_h.
double path_probability(const AttackPath& path, const Harm& harm);

// Argmax of path_probability. Ties prefer the shorter path, then the
// lexicographically smaller host sequence. Throws NoPathError on empty.
std::pair<double, AttackPath> max_path_probability(const std::vector<AttackPath>& paths,
                                                   const Harm& harm);

// Attacker return on one path: sum of r_h / ac_h. Throws UnexploitableHost
// when the path crosses a host with no vulnerabilities (infinite cost).
double path_roa(const AttackPath& path, const Harm& harm);
double network_roa(const std::vector<AttackPath>& paths, const Harm& harm);

// Total host impact along a path, and its sum over all paths.
double path_impact(const AttackPath& path, const Harm& harm);
double network_impact(const std::vector<AttackPath>& paths, const Harm& harm);

// Number of attack scenarios: the size of the enumerated path set.
int nas(const std::vector<AttackPath>& paths);

// Share of finding instances per CVSS band, over every instance on every
// host (the same CVE on three hosts counts three times). Sums to 100.
// Throws EmptyScan when the scan has no records.
SeverityPercentages severity_percentages(const ingest::ScanResultFile& scan);

// Full evaluation over an already-enumerated path set. sp is 0 when the
// set is empty.
MetricsReport evaluate(const Harm& harm, const std::vector<AttackPath>& paths,
                       const ingest::ScanResultFile& scan);

std::string render_metrics_text(const MetricsReport& report, const std::string& target);

}  // namespace harmkit::metrics
