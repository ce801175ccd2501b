#ifndef XBOUND_APP_ANALYZER_HPP
#define XBOUND_APP_ANALYZER_HPP

#include <string>
#include <vector>

#include "xbound/js_frontend.hpp"
#include "xbound/rules.hpp"

namespace xbound {

// Entities that directly influence a tracked argument. kind is one of
// param, field (destructured request member), external, opaque (result of
// an unrelated call), literal.
struct InfluenceEntity {
    std::string name;
    std::string kind;
    SourceLoc def;
    // functions walked to reach this entity, call-site function first
    std::vector<std::string> chain;
};

struct InfluenceSet {
    std::vector<InfluenceEntity> entities; // deduped by (name, location)
    bool truncated = false;                // depth limit hit
};

struct AppFinding {
    std::string api;
    SourceLoc callLoc;
    std::string matchedSource;
    std::vector<std::string> callerChain; // call-site function outward
    bool truncated = false;
};

// Member or bare calls named rule.apiName whose argument list covers the
// tracked position.
std::vector<ScriptCallSite> find_call_sites(
    const std::vector<JsParseResult>& files, const AppRuleSpec& rule);

// Backward def-use walk inside one function, starting from an argument
// expression. Results of unrelated calls are opaque leaves; parameters
// stay in the set even when callers are followed later.
InfluenceSet backward_intra(const ScriptFunction& fn,
                            const std::string& argText);

// Inter-procedural extension: parameters continue at each caller's
// argument expression, at most depthLimit ascents, each (function,
// entity) visited once.
InfluenceSet backward_inter(const CallGraph& graph,
                            const ScriptCallSite& site,
                            const AppRuleSpec& rule, int depthLimit);

// Misuse iff a source pattern matches an influence entity.
bool evaluate(const AppRuleSpec& rule, const InfluenceSet& set,
              std::string* matched = nullptr);

std::vector<AppFinding> analyze_app(const std::vector<JsParseResult>& files,
                                    const std::vector<AppRuleSpec>& rules,
                                    int depthLimit = 16);

} // namespace xbound

#endif
