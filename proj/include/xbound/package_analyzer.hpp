#ifndef XBOUND_PACKAGE_ANALYZER_HPP
#define XBOUND_PACKAGE_ANALYZER_HPP

#include <map>
#include <string>
#include <vector>

#include "xbound/cpp_frontend.hpp"
#include "xbound/graph.hpp"
#include "xbound/js_frontend.hpp"
#include "xbound/rules.hpp"

namespace xbound {

struct Finding {
    std::string packageId;
    MisuseId misuse = MisuseId::M3;
    Verdict verdict = Verdict::NoFlow;
    std::string kind; // "cross" or "native"
    std::string exportedName;
    std::string scriptFunction;
    std::string nativeFunction;
    std::string sink;              // witness sink "file:line"
    std::vector<int> witness;      // node ids, root first
    std::vector<std::string> sanitizers; // reachable sanitizer locations
    FunctionGraph graph;           // the judged graph, for dot emission
};

struct PackageInventory {
    std::map<std::string, int> fileCounts; // keyed by extension
    std::vector<std::string> headers;      // api header classification
    int bindingCount = 0;
    bool directExport = false;
};

struct PackageReport {
    std::string id;
    std::string root;
    PackageInventory inventory;
    std::vector<BindingEntry> bindings;
    std::vector<Finding> findings;
    std::vector<std::string> diagnostics;
    bool timedOut = false;
    long long elapsedMs = 0;
};

struct BoundaryPair {
    const ScriptFunction* scriptFn = nullptr;
    const NativeFunction* nativeFn = nullptr;
    std::string exportedName;
    int callNodeId = 0; // statement node in the script graph
};

// Matches native call sites against registered bindings. Bindings whose
// symbol has no parsed definition and call refs with no matching export
// become diagnostics.
std::vector<BoundaryPair> link_boundary(
    const std::vector<BindingEntry>& bindings,
    const std::vector<NativeCallRef>& refs,
    const std::vector<JsParseResult>& scripts,
    const std::vector<CppParseResult>& natives,
    std::vector<std::string>* diagnostics = nullptr);

// Two-condition rule on a single native function graph.
Finding analyze_intra(const NativeFunction& fn, const RuleSet& rules);

// Merged-graph judgement for one boundary pair, from the script root.
Finding analyze_cross(const BoundaryPair& pair, const RuleSet& rules);

// Full pipeline over one package directory. The budget is wall-clock
// seconds; on exhaustion the report is partial and flagged timed out.
// Throws std::runtime_error when the directory is missing.
PackageReport analyze_package(const std::string& dir,
                              const LoadedRules& loaded,
                              double budgetSeconds = 60.0);

// Directories that directly contain script or C/C++ sources, searched
// recursively under each root. Sorted and deduplicated.
std::vector<std::string> discover_packages(
    const std::vector<std::string>& roots);

} // namespace xbound

#endif
