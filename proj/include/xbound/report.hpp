#ifndef XBOUND_REPORT_HPP
#define XBOUND_REPORT_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "xbound/app_analyzer.hpp"
#include "xbound/package_analyzer.hpp"

namespace xbound {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunConfig {
    std::string rules = "default"; // "default" or the rules file path
    double budgetSeconds = 60.0;
    int depth = 16;
    int jobs = 1;
    // per-package wall-clock timings make reports nondeterministic, so
    // elapsed_ms serializes as 0 unless explicitly requested
    bool timings = false;
};

// Deterministic serialization: stable key order, packages sorted by id,
// findings and app findings pre-sorted by the analyzers.
nlohmann::ordered_json report_json(const std::vector<PackageReport>& packages,
                                   const std::vector<AppFinding>& appFindings,
                                   const RunConfig& config);

// Human-readable inventory table plus aggregate counts.
std::string stats_text(const std::vector<PackageReport>& packages);

} // namespace xbound

#endif
