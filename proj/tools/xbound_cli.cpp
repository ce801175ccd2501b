#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "xbound/app_analyzer.hpp"
#include "xbound/package_analyzer.hpp"
#include "xbound/report.hpp"

namespace fs = std::filesystem;
using namespace xbound;

namespace {

int env_jobs() {
    const char* raw = std::getenv("XBOUND_JOBS");
    if (raw) {
        int n = std::atoi(raw);
        if (n > 0)
            return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

LoadedRules resolve_rules(const std::string& path) {
    if (path.empty())
        return LoadedRules{default_rules(), builtin_app_rules()};
    return load_rules(path);
}

void write_output(const std::string& jsonPath, const std::string& text) {
    if (jsonPath.empty()) {
        std::cout << text << "\n";
        return;
    }
    std::ofstream out(jsonPath, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + jsonPath);
    out << text << "\n";
}

std::vector<PackageReport> scan_packages(const std::vector<std::string>& roots,
                                         const LoadedRules& rules,
                                         double budget, int jobs) {
    std::vector<std::string> dirs = discover_packages(roots);
    std::vector<PackageReport> reports(dirs.size());
    if (jobs > static_cast<int>(dirs.size()))
        jobs = static_cast<int>(dirs.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < dirs.size();
             i = next.fetch_add(1))
            reports[i] = analyze_package(dirs[i], rules, budget);
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t)
            pool.emplace_back(worker);
        for (std::thread& t : pool)
            t.join();
    }
    return reports;
}

void emit_dot_files(const std::vector<PackageReport>& reports,
                    const std::string& dir) {
    fs::create_directories(dir);
    for (const PackageReport& p : reports) {
        for (const Finding& f : p.findings) {
            std::string name = f.exportedName.empty() ? f.nativeFunction
                                                      : f.exportedName;
            fs::path file = fs::path(dir) /
                            (p.id + "." + f.kind + "." + name + ".dot");
            std::ofstream out(file, std::ios::binary);
            out << emit_dot(f.graph, "g");
        }
    }
}

int cmd_scan(const std::vector<std::string>& roots,
             const std::string& rulesPath, double budget,
             const std::string& jsonPath, const std::string& dotDir,
             bool timings) {
    LoadedRules rules = resolve_rules(rulesPath);
    RunConfig config;
    config.rules = rulesPath.empty() ? "default" : rulesPath;
    config.budgetSeconds = budget;
    config.jobs = env_jobs();
    config.timings = timings;

    auto reports = scan_packages(roots, rules, budget, config.jobs);
    if (!dotDir.empty())
        emit_dot_files(reports, dotDir);
    write_output(jsonPath, report_json(reports, {}, config).dump(2));

    for (const PackageReport& p : reports)
        for (const Finding& f : p.findings)
            if (f.verdict == Verdict::Vulnerable)
                return 1;
    return 0;
}

int cmd_app(const std::string& root, const std::string& rulesPath, int depth,
            const std::string& jsonPath) {
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
    write_output(jsonPath, report_json({}, findings, config).dump(2));
    return findings.empty() ? 0 : 1;
}

int cmd_stats(const std::vector<std::string>& roots,
              const std::string& rulesPath) {
    LoadedRules rules = resolve_rules(rulesPath);
    std::vector<PackageReport> reports;
    for (const std::string& dir : discover_packages(roots))
        reports.push_back(analyze_package(dir, rules));
    std::cout << stats_text(reports);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cross-language data-flow scanner for native extensions"};
    app.require_subcommand(1);

    std::vector<std::string> roots;
    std::string rulesPath, jsonPath, dotDir, appRoot;
    double budget = 60.0;
    int depth = 16;
    bool timings = false;

    CLI::App* scan = app.add_subcommand("scan", "analyze packages");
    scan->add_option("roots", roots, "directories to scan")->required();
    scan->add_option("--rules", rulesPath, "rules file");
    scan->add_option("--budget-seconds", budget, "per-package budget");
    scan->add_option("--json", jsonPath, "report output file");
    scan->add_option("--emit-dot", dotDir, "write finding graphs here");
    scan->add_flag("--timings", timings, "record real elapsed_ms");

    CLI::App* appCmd = app.add_subcommand("app", "analyze an application");
    appCmd->add_option("root", appRoot, "application directory")->required();
    appCmd->add_option("--rules", rulesPath, "rules file");
    appCmd->add_option("--depth", depth, "inter-procedural depth limit");
    appCmd->add_option("--json", jsonPath, "report output file");

    CLI::App* stats = app.add_subcommand("stats", "inventory summary");
    stats->add_option("roots", roots, "directories to scan")->required();
    stats->add_option("--rules", rulesPath, "rules file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (scan->parsed())
            return cmd_scan(roots, rulesPath, budget, jsonPath, dotDir,
                            timings);
        if (appCmd->parsed())
            return cmd_app(appRoot, rulesPath, depth, jsonPath);
        if (stats->parsed())
            return cmd_stats(roots, rulesPath);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
