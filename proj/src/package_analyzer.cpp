#include "xbound/package_analyzer.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <set>
#include <stdexcept>

namespace fs = std::filesystem;

namespace xbound {

namespace {

using Clock = std::chrono::steady_clock;

bool is_native_ext(const std::string& ext) {
    return ext == ".c" || ext == ".cc" || ext == ".cpp" || ext == ".cxx";
}

bool is_header_ext(const std::string& ext) {
    return ext == ".h" || ext == ".hpp" || ext == ".hh";
}

// Fills verdict-dependent fields from an already tagged graph.
void judge_into(Finding& finding, FunctionGraph graph,
                const RuleSet& rules) {
    finding.verdict = judge(graph);
    finding.witness = witness_path(graph);
    if (!finding.witness.empty()) {
        const GraphNode* sink = graph.find_node(finding.witness.back());
        finding.sink = sink->loc.str();
        // misuse id comes from the pattern that matched the sink call
        finding.misuse = MisuseId::M3;
        for (const std::string& c : statement_callees(sink->label)) {
            for (const CallPattern& p : rules.nativeSinks) {
                if (p.matches(c)) {
                    finding.misuse = p.misuse;
                    break;
                }
            }
        }
    }
    for (int id : reachable(graph, graph.root(), RoleSanitizer))
        finding.sanitizers.push_back(graph.find_node(id)->loc.str());
    std::sort(finding.sanitizers.begin(), finding.sanitizers.end());
    finding.sanitizers.erase(
        std::unique(finding.sanitizers.begin(), finding.sanitizers.end()),
        finding.sanitizers.end());
    finding.graph = std::move(graph);
}

} // namespace

std::vector<BoundaryPair> link_boundary(
    const std::vector<BindingEntry>& bindings,
    const std::vector<NativeCallRef>& refs,
    const std::vector<JsParseResult>& scripts,
    const std::vector<CppParseResult>& natives,
    std::vector<std::string>* diagnostics) {
    auto note = [&](const std::string& msg) {
        if (diagnostics)
            diagnostics->push_back(msg);
    };

    auto find_native = [&](const std::string& symbol)
        -> const NativeFunction* {
        for (const CppParseResult& file : natives)
            for (const NativeFunction& fn : file.functions)
                if (fn.symbol == symbol)
                    return &fn;
        return nullptr;
    };
    auto find_script = [&](const std::string& name)
        -> const ScriptFunction* {
        for (const JsParseResult& file : scripts)
            for (const ScriptFunction& fn : file.functions)
                if (fn.name == name)
                    return &fn;
        return nullptr;
    };

    std::vector<BoundaryPair> pairs;
    std::set<std::string> matchedExports;
    for (const NativeCallRef& ref : refs) {
        const BindingEntry* binding = nullptr;
        for (const BindingEntry& b : bindings)
            if (b.exportedName == ref.exportedName)
                binding = &b;
        if (!binding) {
            note(ref.loc.str() + ": call to unregistered export '" +
                 ref.exportedName + "'");
            continue;
        }
        matchedExports.insert(binding->exportedName);
        const NativeFunction* native = find_native(binding->nativeSymbol);
        if (!native) {
            note(ref.loc.str() + ": native symbol '" +
                 binding->nativeSymbol + "' has no parsed definition");
            continue;
        }
        const ScriptFunction* script = find_script(ref.function);
        if (!script)
            continue;
        BoundaryPair pair;
        pair.scriptFn = script;
        pair.nativeFn = native;
        pair.exportedName = ref.exportedName;
        pair.callNodeId = ref.stmtIndex;
        pairs.push_back(pair);
    }
    for (const BindingEntry& b : bindings) {
        if (!matchedExports.count(b.exportedName))
            note(b.loc.str() + ": export '" + b.exportedName +
                 "' is never called from script code");
    }
    return pairs;
}

Finding analyze_intra(const NativeFunction& fn, const RuleSet& rules) {
    Finding finding;
    finding.kind = "native";
    finding.nativeFunction = fn.symbol;
    FunctionGraph graph = build_native_dfg(fn);
    tag_native_roles(graph, rules);
    judge_into(finding, std::move(graph), rules);
    return finding;
}

Finding analyze_cross(const BoundaryPair& pair, const RuleSet& rules) {
    Finding finding;
    finding.kind = "cross";
    finding.exportedName = pair.exportedName;
    finding.scriptFunction = pair.scriptFn->name;
    finding.nativeFunction = pair.nativeFn->symbol;

    FunctionGraph script = build_script_dfg(*pair.scriptFn);
    tag_script_roles(script, rules);
    FunctionGraph native = build_native_dfg(*pair.nativeFn);
    tag_native_roles(native, rules);
    CrossLanguageGraph merged(script, pair.callNodeId, native);
    judge_into(finding, merged.merged(), rules);
    return finding;
}

std::vector<std::string> discover_packages(
    const std::vector<std::string>& roots) {
    std::set<std::string> found;

    auto has_sources = [](const fs::path& dir) {
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (!entry.is_regular_file())
                continue;
            std::string ext = entry.path().extension().string();
            if (is_native_ext(ext) || ext == ".js")
                return true;
        }
        return false;
    };

    auto walk = [&](const fs::path& dir, auto&& self) -> void {
        if (!fs::is_directory(dir))
            return;
        if (has_sources(dir)) {
            found.insert(dir.lexically_normal().generic_string());
            return;
        }
        std::vector<fs::path> subdirs;
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.is_directory())
                subdirs.push_back(entry.path());
        std::sort(subdirs.begin(), subdirs.end());
        for (const fs::path& sub : subdirs)
            self(sub, self);
    };

    for (const std::string& root : roots) {
        if (!fs::exists(root))
            throw std::runtime_error("no such directory: " + root);
        walk(fs::path(root), walk);
    }
    return {found.begin(), found.end()};
}

PackageReport analyze_package(const std::string& dir,
                              const LoadedRules& loaded,
                              double budgetSeconds) {
    if (!fs::is_directory(dir))
        throw std::runtime_error("no such directory: " + dir);

    auto start = Clock::now();
    auto deadline =
        start + std::chrono::duration_cast<Clock::duration>(
                    std::chrono::duration<double>(budgetSeconds));
    PackageReport report;
    report.root = fs::path(dir).lexically_normal().generic_string();
    report.id = fs::path(report.root).filename().string();
    if (report.id.empty())
        report.id = report.root;

    auto out_of_budget = [&] {
        if (Clock::now() < deadline)
            return false;
        report.timedOut = true;
        return true;
    };

    std::vector<fs::path> nativePaths, scriptPaths;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file())
            continue;
        std::string ext = entry.path().extension().string();
        if (is_native_ext(ext))
            nativePaths.push_back(entry.path());
        else if (ext == ".js")
            scriptPaths.push_back(entry.path());
        if (is_native_ext(ext) || is_header_ext(ext) || ext == ".js" ||
            ext == ".ts")
            report.inventory.fileCounts[ext] += 1;
    }
    std::sort(nativePaths.begin(), nativePaths.end());
    std::sort(scriptPaths.begin(), scriptPaths.end());

    std::vector<CppParseResult> natives;
    std::vector<JsParseResult> scripts;
    for (const fs::path& p : nativePaths) {
        if (out_of_budget())
            break;
        try {
            natives.push_back(parse_native_file(p.generic_string()));
        } catch (const std::exception& e) {
            report.diagnostics.push_back(e.what());
        }
    }
    for (const fs::path& p : scriptPaths) {
        if (out_of_budget())
            break;
        try {
            scripts.push_back(parse_script_file(p.generic_string()));
        } catch (const std::exception& e) {
            report.diagnostics.push_back(e.what());
        }
    }

    std::set<std::string> headerKinds;
    for (const CppParseResult& file : natives) {
        for (const std::string& inc : file.includes) {
            std::string base = fs::path(inc).filename().string();
            if (base == "nan.h")
                headerKinds.insert("nan.h");
            else if (base == "napi.h")
                headerKinds.insert("napi.h");
            else if (base == "node_api.h")
                headerKinds.insert("node_api.h");
            else if (base == "node.h" || base == "v8.h")
                headerKinds.insert("node.h/v8.h");
        }
        for (const std::string& d : file.diagnostics)
            report.diagnostics.push_back(d);
    }
    if (headerKinds.empty() && !natives.empty())
        headerKinds.insert("none");
    report.inventory.headers.assign(headerKinds.begin(), headerKinds.end());

    for (const CppParseResult& file : natives) {
        auto entries = extract_bindings(file, &report.diagnostics);
        report.bindings.insert(report.bindings.end(), entries.begin(),
                               entries.end());
    }
    std::sort(report.bindings.begin(), report.bindings.end(),
              [](const BindingEntry& a, const BindingEntry& b) {
                  return std::tie(a.exportedName, a.nativeSymbol) <
                         std::tie(b.exportedName, b.nativeSymbol);
              });
    report.inventory.bindingCount = static_cast<int>(report.bindings.size());

    std::vector<NativeCallRef> refs;
    for (const JsParseResult& file : scripts) {
        auto r = find_native_call_sites(file, &report.diagnostics);
        refs.insert(refs.end(), r.begin(), r.end());
    }

    std::vector<BoundaryPair> pairs =
        report.timedOut ? std::vector<BoundaryPair>{}
                        : link_boundary(report.bindings, refs, scripts,
                                        natives, &report.diagnostics);
    report.inventory.directExport =
        report.inventory.bindingCount > 0 && pairs.empty();

    std::set<std::string> paired;
    for (const BoundaryPair& pair : pairs) {
        if (out_of_budget())
            break;
        paired.insert(pair.nativeFn->symbol);
        Finding f = analyze_cross(pair, loaded.rules);
        f.packageId = report.id;
        if (f.verdict != Verdict::NoFlow)
            report.findings.push_back(std::move(f));
    }

    // bound native functions with no script-side pair are judged alone
    for (const BindingEntry& b : report.bindings) {
        if (paired.count(b.nativeSymbol))
            continue;
        if (out_of_budget())
            break;
        for (const CppParseResult& file : natives) {
            for (const NativeFunction& fn : file.functions) {
                if (fn.symbol != b.nativeSymbol)
                    continue;
                Finding f = analyze_intra(fn, loaded.rules);
                f.packageId = report.id;
                f.exportedName = b.exportedName;
                if (f.verdict != Verdict::NoFlow)
                    report.findings.push_back(std::move(f));
            }
        }
        paired.insert(b.nativeSymbol);
    }

    std::sort(report.findings.begin(), report.findings.end(),
              [](const Finding& a, const Finding& b) {
                  return std::tie(a.kind, a.exportedName, a.scriptFunction,
                                  a.nativeFunction, a.sink) <
                         std::tie(b.kind, b.exportedName, b.scriptFunction,
                                  b.nativeFunction, b.sink);
              });
    report.elapsedMs = std::chrono::duration_cast<std::chrono::milliseconds>(
                           Clock::now() - start)
                           .count();
    return report;
}

} // namespace xbound
