#include "harmkit/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace harmkit::metrics {

int shortest_path_metric(const std::vector<AttackPath>& paths) {
    if (paths.empty()) throw NoPathError("no attack path to measure");
    int shortest = paths.front().length();
    for (const AttackPath& p : paths) shortest = std::min(shortest, p.length());
    return shortest;
}

double path_risk(const AttackPath& path, const Harm& harm) {
    double risk = 0.0;
    for (const std::string& id : path.hosts) {
        const Host& h = harm.host(id);
        risk += h.success_prob * h.impact;
    }
    return risk;
}

double path_probability(const AttackPath& path, const Harm& harm) {
    double probability = 1.0;
    for (const std::string& id : path.hosts) probability *= harm.host(id).success_prob;
    return probability;
}

std::pair<double, AttackPath> max_path_probability(const std::vector<AttackPath>& paths,
                                                   const Harm& harm) {
    if (paths.empty()) throw NoPathError("no attack path to rank");
    const AttackPath* best = nullptr;
    double best_probability = 0.0;
    for (const AttackPath& p : paths) {
        double probability = path_probability(p, harm);
        if (best == nullptr) {
            best = &p;
            best_probability = probability;
            continue;
        }
        bool better = probability > best_probability ||
                      (probability == best_probability &&
                       (p.length() < best->length() ||
                        (p.length() == best->length() && p.hosts < best->hosts)));
        if (better) {
            best = &p;
            best_probability = probability;
        }
    }
    return {best_probability, *best};
}

double path_roa(const AttackPath& path, const Harm& harm) {
    double roa = 0.0;
    for (const std::string& id : path.hosts) {
        const Host& h = harm.host(id);
        if (!h.exploitable()) {
            throw HarmkitError(Errc::UnexploitableHost,
                              "host '" + id + "' on path has no vulnerabilities");
        }
        roa += h.risk / h.attack_cost;
    }
    return roa;
}

double network_roa(const std::vector<AttackPath>& paths, const Harm& harm) {
    double total = 0.0;
    for (const AttackPath& p : paths) total += path_roa(p, harm);
    return total;
}

double path_impact(const AttackPath& path, const Harm& harm) {
    double impact = 0.0;
    for (const std::string& id : path.hosts) impact += harm.host(id).impact;
    return impact;
}

double network_impact(const std::vector<AttackPath>& paths, const Harm& harm) {
    double total = 0.0;
    for (const AttackPath& p : paths) total += path_impact(p, harm);
    return total;
}

int nas(const std::vector<AttackPath>& paths) { return static_cast<int>(paths.size()); }

SeverityPercentages severity_percentages(const ingest::ScanResultFile& scan) {
    if (scan.records.empty()) {
        throw HarmkitError(Errc::EmptyScan, "scan holds no vulnerability instances");
    }
    int high = 0;
    int medium = 0;
    int low = 0;
    for (const ingest::ScanRecord& r : scan.records) {
        switch (severity_from_score(r.cvss_bs)) {
            case Severity::High: ++high; break;
            case Severity::Medium: ++medium; break;
            case Severity::Low: ++low; break;
        }
    }
    const double total = static_cast<double>(scan.records.size());
    return {100.0 * high / total, 100.0 * medium / total, 100.0 * low / total};
}

MetricsReport evaluate(const Harm& harm, const std::vector<AttackPath>& paths,
                       const ingest::ScanResultFile& scan) {
    MetricsReport report;
    report.nas = nas(paths);
    report.sp = paths.empty() ? 0 : shortest_path_metric(paths);
    report.aim = network_impact(paths, harm);
    report.roa = network_roa(paths, harm);
    report.severity_pct = severity_percentages(scan);
    return report;
}

std::string render_metrics_text(const MetricsReport& report, const std::string& target) {
    auto round2 = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", v);
        return std::string(buf);
    };
    std::ostringstream out;
    out << "Security evaluation (target " << target << ")\n";
    out << "  NAS    " << report.nas << "\n";
    out << "  SP     " << report.sp << "\n";
    out << "  AIM    " << round2(report.aim) << "\n";
    out << "  ROA    " << round2(report.roa) << "\n";
    out << "  High   " << round2(report.severity_pct.high) << "%\n";
    out << "  Medium " << round2(report.severity_pct.medium) << "%\n";
    out << "  Low    " << round2(report.severity_pct.low) << "%\n";
    return out.str();
}

}  // namespace harmkit::metrics
