#include "harmkit/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

#include "harmkit/serialize.hpp"

namespace harmkit::ingest {
namespace {

std::string trim(std::string_view s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return std::string(s.substr(begin, end - begin));
}

bool looks_like_json(const std::string& text) {
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        return c == '{' || c == '[';
    }
    return false;
}

struct Record {
    int line = 0;
    std::vector<std::string> fields;

    const std::string& keyword() const { return fields.front(); }
    int arity() const { return static_cast<int>(fields.size()) - 1; }
};

// Splits the line-oriented form: one record per line, fields separated by
// '|', full-line '#' comments and blank lines skipped.
std::vector<Record> split_records(const std::string& text) {
    std::vector<Record> records;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line(text.data() + pos,
                              (eol == std::string::npos ? text.size() : eol) - pos);
        ++line_no;
        pos = (eol == std::string::npos) ? text.size() + 1 : eol + 1;

        std::string trimmed = trim(line);
        if (trimmed.empty() || trimmed.front() == '#') continue;

        Record rec;
        rec.line = line_no;
        std::size_t field_start = 0;
        while (true) {
            std::size_t sep = trimmed.find('|', field_start);
            rec.fields.push_back(trim(std::string_view(trimmed).substr(
                field_start, (sep == std::string::npos ? trimmed.size() : sep) - field_start)));
            if (sep == std::string::npos) break;
            field_start = sep + 1;
        }
        records.push_back(std::move(rec));
    }
    return records;
}

double parse_score(const std::string& field, int line) {
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        throw ParseError(Errc::Syntax, "expected a CVSS base score, got '" + field + "'", line);
    }
    if (!(value >= 0.0 && value <= 10.0)) {
        throw ParseError(Errc::Syntax, "CVSS base score " + field + " out of [0, 10]", line);
    }
    return value;
}

void require_arity(const Record& rec, int min_arity, int max_arity = -1) {
    if (max_arity < 0) max_arity = min_arity;
    if (rec.arity() < min_arity || rec.arity() > max_arity) {
        throw ParseError(Errc::Syntax,
                         "'" + rec.keyword() + "' record has " + std::to_string(rec.arity()) +
                             " field(s), expected " + std::to_string(min_arity) +
                             (max_arity > min_arity ? "+" : ""),
                         rec.line);
    }
}

}  // namespace

bool NetworkSpecFile::has_host(const std::string& id) const {
    return std::any_of(hosts.begin(), hosts.end(),
                       [&](const SpecHost& h) { return h.id == id; });
}

int ScanResultFile::executable_count() const {
    return static_cast<int>(std::count_if(records.begin(), records.end(),
                                          [](const ScanRecord& r) { return r.executable(); }));
}

int ScanResultFile::flagged_count() const {
    return static_cast<int>(records.size()) - executable_count();
}

const CatalogEntry* ExploitCatalogFile::find(const std::string& cve_id) const {
    for (const CatalogEntry& e : entries) {
        if (e.cve_id == cve_id) return &e;
    }
    return nullptr;
}

std::vector<std::string> ExploitCatalogFile::ids_sharing_module(
    const std::string& exploit_module) const {
    std::vector<std::string> ids;
    for (const CatalogEntry& e : entries) {
        if (e.exploit_module == exploit_module) ids.push_back(e.cve_id);
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

NetworkSpecFile parse_network_spec(const std::string& text) {
    NetworkSpecFile spec;
    if (looks_like_json(text)) {
        spec = serialize::network_spec_from_json(serialize::parse_json(text));
    } else {
        bool saw_target = false;
        for (const Record& rec : split_records(text)) {
            if (rec.keyword() == "host") {
                require_arity(rec, 2, 3);
                SpecHost host;
                host.id = rec.fields[1];
                host.os = rec.fields[2];
                if (rec.arity() == 3) {
                    if (rec.fields[3] == "up") {
                        host.running = true;
                    } else if (rec.fields[3] == "down") {
                        host.running = false;
                    } else {
                        throw ParseError(Errc::Syntax,
                                         "host state must be 'up' or 'down', got '" +
                                             rec.fields[3] + "'",
                                         rec.line);
                    }
                }
                if (host.id.empty()) {
                    throw ParseError(Errc::Syntax, "host id must not be empty", rec.line);
                }
                if (spec.has_host(host.id)) {
                    throw ParseError(Errc::DuplicateHost, "duplicate host '" + host.id + "'",
                                     rec.line);
                }
                spec.hosts.push_back(std::move(host));
            } else if (rec.keyword() == "target") {
                require_arity(rec, 1);
                if (saw_target) {
                    throw ParseError(Errc::Syntax, "target declared twice", rec.line);
                }
                spec.target = rec.fields[1];
                saw_target = true;
            } else if (rec.keyword() == "entry") {
                require_arity(rec, 1, 1 << 20);
                for (int i = 1; i <= rec.arity(); ++i) {
                    spec.attacker_entry.push_back(rec.fields[i]);
                }
            } else {
                throw ParseError(Errc::Syntax, "unknown record '" + rec.keyword() + "'", rec.line);
            }
        }
    }

    if (spec.hosts.empty()) {
        throw ParseError(Errc::Syntax, "network spec declares no hosts");
    }
    std::set<std::string> ids;
    for (const SpecHost& h : spec.hosts) {
        if (!ids.insert(h.id).second) {
            throw ParseError(Errc::DuplicateHost, "duplicate host '" + h.id + "'");
        }
    }
    if (spec.target.empty()) {
        throw ParseError(Errc::Syntax, "network spec declares no target");
    }
    if (!spec.has_host(spec.target)) {
        throw ParseError(Errc::UnknownTarget, "target '" + spec.target + "' is not a host");
    }
    if (spec.attacker_entry.empty()) {
        throw ParseError(Errc::Syntax, "network spec declares no attacker entry points");
    }
    for (const std::string& id : spec.attacker_entry) {
        if (!spec.has_host(id)) {
            throw ParseError(Errc::UnknownHost, "entry point '" + id + "' is not a host");
        }
    }
    return spec;
}

ScanResultFile parse_scan_results(const std::string& text, const NetworkSpecFile& spec) {
    ScanResultFile scan;
    if (looks_like_json(text)) {
        scan = serialize::scan_results_from_json(serialize::parse_json(text));
        for (const ScanRecord& rec : scan.records) {
            if (!spec.has_host(rec.host_id)) {
                throw ParseError(Errc::UnknownHost,
                                 "scan record for unknown host '" + rec.host_id + "'");
            }
            if (!(rec.cvss_bs >= 0.0 && rec.cvss_bs <= 10.0)) {
                throw ParseError(Errc::Syntax, "CVSS base score out of [0, 10] for host '" +
                                                   rec.host_id + "'");
            }
        }
        return scan;
    }
    for (const Record& rec : split_records(text)) {
        if (rec.keyword() != "vuln") {
            throw ParseError(Errc::Syntax, "unknown record '" + rec.keyword() + "'", rec.line);
        }
        require_arity(rec, 4);
        ScanRecord record;
        record.host_id = rec.fields[1];
        record.vuln_name = rec.fields[2];
        if (!rec.fields[3].empty() && rec.fields[3] != "-") {
            record.cve_id = rec.fields[3];
        }
        record.cvss_bs = parse_score(rec.fields[4], rec.line);
        if (record.vuln_name.empty()) {
            throw ParseError(Errc::Syntax, "vulnerability name must not be empty", rec.line);
        }
        if (!spec.has_host(record.host_id)) {
            throw ParseError(Errc::UnknownHost,
                             "scan record for unknown host '" + record.host_id + "'", rec.line);
        }
        scan.records.push_back(std::move(record));
    }
    return scan;
}

ReachabilityRulesFile parse_rules_file(const std::string& text) {
    if (looks_like_json(text)) {
        return serialize::rules_file_from_json(serialize::parse_json(text));
    }
    ReachabilityRulesFile file;
    for (const Record& rec : split_records(text)) {
        if (rec.keyword() == "subnet") {
            require_arity(rec, 2, 1 << 20);
            const std::string& label = rec.fields[1];
            if (file.subnets.count(label) != 0) {
                throw ParseError(Errc::Syntax, "subnet '" + label + "' declared twice", rec.line);
            }
            std::vector<std::string> members(rec.fields.begin() + 2, rec.fields.end());
            file.subnets.emplace(label, std::move(members));
        } else if (rec.keyword() == "rule") {
            require_arity(rec, 2, 1 << 20);
            for (int i = 2; i <= rec.arity(); ++i) {
                file.rules.push_back({rec.fields[1], rec.fields[i]});
            }
        } else {
            throw ParseError(Errc::Syntax, "unknown record '" + rec.keyword() + "'", rec.line);
        }
    }
    return file;
}

ReachabilityGraph expand_rules(const ReachabilityRulesFile& rules, const NetworkSpecFile& spec) {
    ReachabilityGraph graph;
    graph.nodes.insert(kAttackerNode);
    for (const SpecHost& h : spec.hosts) graph.nodes.insert(h.id);

    for (const auto& [label, members] : rules.subnets) {
        for (const std::string& member : members) {
            if (!spec.has_host(member)) {
                throw ParseError(Errc::UnresolvedLabel,
                                 "subnet '" + label + "' member '" + member + "' is not a host");
            }
        }
    }

    auto resolve_sources = [&](const std::string& name) -> std::vector<std::string> {
        if (name == kAttackerNode) return {kAttackerNode};
        if (name == "All") {
            std::vector<std::string> all{kAttackerNode};
            for (const SpecHost& h : spec.hosts) all.push_back(h.id);
            return all;
        }
        if (auto it = rules.subnets.find(name); it != rules.subnets.end()) return it->second;
        if (spec.has_host(name)) return {name};
        throw ParseError(Errc::UnresolvedLabel, "unresolved rule source '" + name + "'");
    };
    auto resolve_destinations = [&](const std::string& name) -> std::vector<std::string> {
        if (auto it = rules.subnets.find(name); it != rules.subnets.end()) return it->second;
        if (spec.has_host(name)) return {name};
        throw ParseError(Errc::UnresolvedLabel, "unresolved rule destination '" + name + "'");
    };

    for (const ReachabilityRule& rule : rules.rules) {
        for (const std::string& from : resolve_sources(rule.from)) {
            for (const std::string& to : resolve_destinations(rule.to)) {
                if (from == to) continue;  // subnet self-expansion; cycles stay legal
                graph.add_edge(from, to);
            }
        }
    }
    graph.validate();
    return graph;
}

ReachabilityGraph parse_reachability_rules(const std::string& text, const NetworkSpecFile& spec) {
    return expand_rules(parse_rules_file(text), spec);
}

ExploitCatalogFile load_exploit_catalog(const std::string& text) {
    ExploitCatalogFile catalog;
    if (looks_like_json(text)) {
        catalog = serialize::exploit_catalog_from_json(serialize::parse_json(text));
    } else {
        for (const Record& rec : split_records(text)) {
            if (rec.keyword() != "exploit") {
                throw ParseError(Errc::Syntax, "unknown record '" + rec.keyword() + "'", rec.line);
            }
            require_arity(rec, 3);
            CatalogEntry entry{rec.fields[1], rec.fields[2], rec.fields[3]};
            if (entry.cve_id.empty() || entry.exploit_module.empty() || entry.payload.empty()) {
                throw ParseError(Errc::Syntax, "catalog fields must not be empty", rec.line);
            }
            catalog.entries.push_back(std::move(entry));
        }
    }
    std::set<std::string> ids;
    for (const CatalogEntry& e : catalog.entries) {
        if (!ids.insert(e.cve_id).second) {
            throw ParseError(Errc::DuplicateCve, "duplicate catalog id '" + e.cve_id + "'");
        }
    }
    return catalog;
}

}  // namespace harmkit::ingest
