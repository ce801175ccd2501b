#include "xbound/report.hpp"

#include <algorithm>
#include <sstream>

namespace xbound {

using nlohmann::ordered_json;

namespace {

ordered_json finding_json(const Finding& f) {
    ordered_json j;
    j["kind"] = f.kind;
    j["misuse"] = misuse_name(f.misuse);
    j["verdict"] = verdict_name(f.verdict);
    j["exported_name"] = f.exportedName;
    j["script_function"] = f.scriptFunction;
    j["native_function"] = f.nativeFunction;
    j["sink"] = f.sink;
    j["witness_path"] = f.witness;
    j["sanitizers"] = f.sanitizers;
    return j;
}

ordered_json inventory_json(const PackageInventory& inv) {
    ordered_json j;
    ordered_json files = ordered_json::object();
    for (const auto& [ext, count] : inv.fileCounts)
        files[ext] = count;
    j["files"] = files;
    j["headers"] = inv.headers;
    j["binding_count"] = inv.bindingCount;
    j["direct_export"] = inv.directExport;
    return j;
}

ordered_json app_finding_json(const AppFinding& f) {
    ordered_json j;
    j["api"] = f.api;
    j["call_site"] = f.callLoc.str();
    j["matched_source"] = f.matchedSource;
    j["caller_chain"] = f.callerChain;
    j["truncated"] = f.truncated;
    return j;
}

} // namespace

ordered_json report_json(const std::vector<PackageReport>& packages,
                         const std::vector<AppFinding>& appFindings,
                         const RunConfig& config) {
    ordered_json root;
    root["version"] = kToolVersion;
    ordered_json cfg;
    cfg["rules"] = config.rules;
    cfg["budget_seconds"] = config.budgetSeconds;
    cfg["depth"] = config.depth;
    cfg["jobs"] = config.jobs;
    root["config"] = cfg;

    std::vector<const PackageReport*> sorted;
    for (const PackageReport& p : packages)
        sorted.push_back(&p);
    std::sort(sorted.begin(), sorted.end(),
              [](const PackageReport* a, const PackageReport* b) {
                  return std::tie(a->id, a->root) < std::tie(b->id, b->root);
              });

    ordered_json pkgs = ordered_json::array();
    for (const PackageReport* p : sorted) {
        ordered_json j;
        j["id"] = p->id;
        j["root"] = p->root;
        j["inventory"] = inventory_json(p->inventory);
        ordered_json bindings = ordered_json::array();
        for (const BindingEntry& b : p->bindings) {
            ordered_json bj;
            bj["exported"] = b.exportedName;
            bj["symbol"] = b.nativeSymbol;
            bj["style"] = api_style_name(b.style);
            bindings.push_back(bj);
        }
        j["bindings"] = bindings;
        ordered_json findings = ordered_json::array();
        for (const Finding& f : p->findings)
            findings.push_back(finding_json(f));
        j["findings"] = findings;
        j["diagnostics"] = p->diagnostics;
        j["timed_out"] = p->timedOut;
        j["elapsed_ms"] = config.timings ? p->elapsedMs : 0;
        pkgs.push_back(j);
    }
    root["packages"] = pkgs;

    ordered_json apps = ordered_json::array();
    for (const AppFinding& f : appFindings)
        apps.push_back(app_finding_json(f));
    root["app_findings"] = apps;
    return root;
}

std::string stats_text(const std::vector<PackageReport>& packages) {
    std::ostringstream os;
    int withNative = 0, directExports = 0;
    std::map<std::string, int> headerHistogram;
    for (const PackageReport& p : packages) {
        int nativeFiles = 0;
        for (const auto& [ext, count] : p.inventory.fileCounts)
            if (ext != ".js" && ext != ".ts")
                nativeFiles += count;
        bool hasNative = nativeFiles > 0;
        if (hasNative)
            ++withNative;
        if (p.inventory.directExport)
            ++directExports;
        for (const std::string& h : p.inventory.headers)
            headerHistogram[h] += 1;

        os << p.id << ": ";
        bool first = true;
        for (const auto& [ext, count] : p.inventory.fileCounts) {
            if (!first)
                os << ", ";
            os << count << " " << ext;
            first = false;
        }
        if (first)
            os << "no sources";
        os << "; headers=";
        if (p.inventory.headers.empty()) {
            os << "-";
        } else {
            for (std::size_t i = 0; i < p.inventory.headers.size(); ++i)
                os << (i ? "," : "") << p.inventory.headers[i];
        }
        os << "; bindings=" << p.inventory.bindingCount;
        if (!hasNative)
            os << "; no C/C++ code";
        if (p.inventory.directExport)
            os << "; direct export";
        os << "\n";
    }
    os << "packages: " << packages.size() << " total, " << withNative
       << " with C/C++ code, " << directExports << " direct exports\n";
    for (const auto& [h, count] : headerHistogram)
        os << "header " << h << ": " << count << "\n";
    return os.str();
}

} // namespace xbound
