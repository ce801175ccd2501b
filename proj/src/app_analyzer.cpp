#include "xbound/app_analyzer.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace xbound {

namespace {

std::string call_tail(const std::string& callee) {
    std::size_t sep = callee.rfind("::");
    return sep == std::string::npos ? callee : callee.substr(sep + 2);
}

bool is_placeholder(const std::string& s) {
    return s.rfind("__fnlit_", 0) == 0;
}

std::string entity_base(const std::string& entity) {
    std::size_t dot = entity.find('.');
    return dot == std::string::npos ? entity : entity.substr(0, dot);
}

struct Walker {
    Walker(const CallGraph& g, int limit) : graph(g), depthLimit(limit) {}

    const CallGraph& graph;
    int depthLimit;
    InfluenceSet out;
    std::set<std::pair<std::string, std::string>> visited; // (fn, entity)
    std::set<std::pair<std::string, std::string>> emitted;  // (name, loc)

    struct Item {
        const ScriptFunction* fn;
        std::string entity;
        int depth;
        std::vector<std::string> chain;
    };
    std::deque<Item> work;

    void leaf(const std::string& name, const std::string& kind,
              const SourceLoc& def, const std::vector<std::string>& chain) {
        if (!emitted.emplace(name, def.str()).second)
            return;
        out.entities.push_back(InfluenceEntity{name, kind, def, chain});
    }

    void seed(const ScriptFunction& fn, const std::string& argText,
              const std::vector<std::string>& chain) {
        if (is_placeholder(argText)) {
            leaf(argText, "opaque", fn.loc, chain);
            return;
        }
        auto entities = expression_entities(argText);
        if (entities.empty()) {
            leaf("literal", "literal", fn.loc, chain);
            return;
        }
        for (const std::string& e : entities)
            push(fn, e, 0, chain);
    }

    void push(const ScriptFunction& fn, const std::string& entity,
              int depth, const std::vector<std::string>& chain) {
        if (!visited.emplace(fn.name, entity).second)
            return;
        work.push_back(Item{&fn, entity, depth, chain});
    }

    void run() {
        while (!work.empty()) {
            Item item = std::move(work.front());
            work.pop_front();
            const ScriptFunction& fn = *item.fn;
            const std::string& entity = item.entity;
            std::string base = entity_base(entity);

            if (is_placeholder(base))
                continue;

            auto dit = fn.destructured.find(base);
            if (dit != fn.destructured.end()) {
                leaf(dit->second + entity.substr(base.size()), "field",
                     fn.loc, item.chain);
                continue;
            }

            auto pit = std::find(fn.params.begin(), fn.params.end(), base);
            if (pit != fn.params.end()) {
                // parameters stay in the set; callers widen it
                leaf(entity, "param", fn.loc, item.chain);
                std::size_t idx =
                    static_cast<std::size_t>(pit - fn.params.begin());
                std::string suffix = entity.substr(base.size());
                for (const CallEdge& edge : graph.edges) {
                    if (edge.resolved != fn.name || edge.routeHandler)
                        continue;
                    if (idx >= edge.argTexts.size())
                        continue;
                    if (item.depth >= depthLimit) {
                        out.truncated = true;
                        continue;
                    }
                    const ScriptFunction* caller = graph.find(edge.caller);
                    if (!caller)
                        continue;
                    std::vector<std::string> chain = item.chain;
                    chain.push_back(edge.caller);
                    const std::string& argText = edge.argTexts[idx];
                    if (is_placeholder(argText)) {
                        leaf(argText, "opaque", edge.loc, chain);
                        continue;
                    }
                    auto entities = expression_entities(argText);
                    if (entities.empty()) {
                        leaf("literal", "literal", edge.loc, chain);
                        continue;
                    }
                    for (const std::string& e : entities)
                        push(*caller, e + suffix, item.depth + 1, chain);
                }
                continue;
            }

            // local definitions
            bool defined = false;
            for (const ScriptStatement& st : fn.body) {
                bool covers = false;
                for (const std::string& d : st.defs) {
                    if (d == entity ||
                        (entity.size() > d.size() &&
                         entity.compare(0, d.size(), d) == 0 &&
                         entity[d.size()] == '.')) {
                        covers = true;
                        break;
                    }
                }
                if (!covers)
                    continue;
                defined = true;
                std::vector<std::string> realCalls;
                for (const std::string& c : st.callees)
                    if (c != "typeof" && c != "instanceof")
                        realCalls.push_back(c);
                if (!realCalls.empty()) {
                    // orthogonal invocation: its result is a leaf
                    leaf(call_tail(realCalls.front()) + "()", "opaque",
                         st.loc, item.chain);
                    continue;
                }
                for (const std::string& u : st.uses) {
                    if (u == entity)
                        continue;
                    push(fn, u, item.depth, item.chain);
                }
            }
            if (!defined)
                leaf(entity, "external", fn.loc, item.chain);
        }
        std::sort(out.entities.begin(), out.entities.end(),
                  [](const InfluenceEntity& a, const InfluenceEntity& b) {
                      return std::tie(a.name, a.kind) <
                             std::tie(b.name, b.kind);
                  });
    }
};

} // namespace

std::vector<ScriptCallSite> find_call_sites(
    const std::vector<JsParseResult>& files, const AppRuleSpec& rule) {
    std::vector<ScriptCallSite> out;
    for (const JsParseResult& file : files) {
        for (const ScriptCallSite& site : file.callSites) {
            if (call_tail(site.callee) != rule.apiName)
                continue;
            if (site.argTexts.size() <= rule.tracked_index())
                continue;
            out.push_back(site);
        }
    }
    return out;
}

InfluenceSet backward_intra(const ScriptFunction& fn,
                            const std::string& argText) {
    CallGraph empty;
    Walker walker{empty, 0};
    walker.seed(fn, argText, {fn.name});
    walker.run();
    return std::move(walker.out);
}

InfluenceSet backward_inter(const CallGraph& graph,
                            const ScriptCallSite& site,
                            const AppRuleSpec& rule, int depthLimit) {
    const ScriptFunction* fn = graph.find(site.function);
    if (!fn || site.argTexts.size() <= rule.tracked_index())
        return {};
    Walker walker{graph, depthLimit};
    walker.seed(*fn, site.argTexts[rule.tracked_index()], {fn->name});
    walker.run();
    return std::move(walker.out);
}

bool evaluate(const AppRuleSpec& rule, const InfluenceSet& set,
              std::string* matched) {
    for (const InfluenceEntity& e : set.entities) {
        for (const std::string& pattern : rule.sources) {
            if (source_matches(pattern, e.name)) {
                if (matched)
                    *matched = e.name;
                return true;
            }
        }
    }
    return false;
}

std::vector<AppFinding> analyze_app(const std::vector<JsParseResult>& files,
                                    const std::vector<AppRuleSpec>& rules,
                                    int depthLimit) {
    CallGraph graph = build_call_graph(files);
    std::vector<AppFinding> findings;
    for (const AppRuleSpec& rule : rules) {
        for (const ScriptCallSite& site : find_call_sites(files, rule)) {
            InfluenceSet set = backward_inter(graph, site, rule, depthLimit);
            std::string matched;
            if (!evaluate(rule, set, &matched))
                continue;
            AppFinding finding;
            finding.api = rule.apiName;
            finding.callLoc = site.loc;
            finding.matchedSource = matched;
            finding.truncated = set.truncated;
            for (const InfluenceEntity& e : set.entities) {
                if (e.name == matched) {
                    finding.callerChain = e.chain;
                    break;
                }
            }
            if (finding.callerChain.empty())
                finding.callerChain.push_back(site.function);
            findings.push_back(std::move(finding));
        }
    }
    std::sort(findings.begin(), findings.end(),
              [](const AppFinding& a, const AppFinding& b) {
                  return std::tie(a.api, a.callLoc.file, a.callLoc.line) <
                         std::tie(b.api, b.callLoc.file, b.callLoc.line);
              });
    return findings;
}

} // namespace xbound
