#include <algorithm>
#include <filesystem>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "xbound/app_analyzer.hpp"
#include "xbound/package_analyzer.hpp"
#include "xbound/report.hpp"

namespace py = pybind11;
using namespace xbound;

namespace {

LoadedRules resolve_rules(const std::string& rulesPath) {
    if (rulesPath.empty())
        return LoadedRules{default_rules(), builtin_app_rules()};
    return load_rules(rulesPath);
}

std::string scan(const std::vector<std::string>& roots,
                 const std::string& rulesPath, double budgetSeconds) {
    LoadedRules rules = resolve_rules(rulesPath);
    RunConfig config;
    config.rules = rulesPath.empty() ? "default" : rulesPath;
    config.budgetSeconds = budgetSeconds;

    std::vector<PackageReport> reports;
    for (const std::string& dir : discover_packages(roots))
        reports.push_back(analyze_package(dir, rules, budgetSeconds));
    return report_json(reports, {}, config).dump(2);
}

std::string scan_app(const std::string& root, const std::string& rulesPath,
                     int depth) {
    namespace fs = std::filesystem;
    LoadedRules rules = resolve_rules(rulesPath);
    RunConfig config;
    config.rules = rulesPath.empty() ? "default" : rulesPath;
    config.depth = depth;

    if (!fs::is_directory(root))
        throw std::runtime_error("no such directory: " + root);
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(root))
        if (entry.is_regular_file() && entry.path().extension() == ".js")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<JsParseResult> parsed;
    for (const fs::path& p : files)
        parsed.push_back(parse_script_file(p.generic_string()));

    auto findings = analyze_app(parsed, rules.appRules, depth);
    return report_json({}, findings, config).dump(2);
}

std::string stats(const std::vector<std::string>& roots,
                  const std::string& rulesPath) {
    LoadedRules rules = resolve_rules(rulesPath);
    std::vector<PackageReport> reports;
    for (const std::string& dir : discover_packages(roots))
        reports.push_back(analyze_package(dir, rules));
    return stats_text(reports);
}

} // namespace

PYBIND11_MODULE(_xbound, m) {
    m.doc() = "cross-language data-flow scanner for native extensions";
    m.attr("__version__") = kToolVersion;

    m.def("scan", &scan, py::arg("roots"), py::arg("rules") = "",
          py::arg("budget_seconds") = 60.0,
          "Analyze packages under the given roots; returns the report as "
          "a JSON string.");
    m.def("scan_app", &scan_app, py::arg("root"), py::arg("rules") = "",
          py::arg("depth") = 16,
          "Analyze an application directory; returns the report as a JSON "
          "string.");
    m.def("stats", &stats, py::arg("roots"), py::arg("rules") = "",
          "Inventory summary for the packages under the given roots.");
    m.def("default_rules_text", &default_rules_text,
          "The embedded default rules file.");
}
