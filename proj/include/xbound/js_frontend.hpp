#ifndef XBOUND_JS_FRONTEND_HPP
#define XBOUND_JS_FRONTEND_HPP

#include <string>
#include <unordered_map>
#include <vector>

#include "xbound/graph.hpp"
#include "xbound/rules.hpp"

namespace xbound {

// One script statement with approximated def-use facts. Dotted entity
// paths (req.body.img) are kept whole; every prefix is also a read.
struct ScriptStatement {
    SourceLoc loc;
    std::string text;
    NodeKind kind = NodeKind::Statement;
    std::vector<std::string> defs;
    std::vector<std::string> uses;
    std::vector<std::string> callees; // normalized; typeof / instanceof
                                      // appear as pseudo call names
    bool comparison = false;
};

struct ScriptFunction {
    std::string name; // canonical: declared, assigned-to, or anon@line:col
    std::vector<std::string> params;
    std::vector<ScriptStatement> body;
    SourceLoc loc;
    // local name -> qualified origin for `const {img} = req.body`
    std::unordered_map<std::string, std::string> destructured;
};

struct ScriptCallSite {
    std::string callee; // normalized, e.g. "db::run"
    std::vector<std::string> argTexts;
    std::string function; // canonical enclosing function
    int stmtIndex = 0;    // node id of the enclosing statement
    SourceLoc loc;
};

struct JsParseResult {
    std::string file;
    // functions[0] is the synthetic top level
    std::vector<ScriptFunction> functions;
    std::vector<ScriptCallSite> callSites;
    // placeholder identifier -> canonical name, for function literals
    // passed as arguments
    std::unordered_map<std::string, std::string> literalNames;
    std::vector<std::string> diagnostics;
};

JsParseResult parse_script(const std::string& source,
                           const std::string& path);
// Throws std::runtime_error when the file cannot be read.
JsParseResult parse_script_file(const std::string& path);

// Entities read by a standalone expression snippet (dotted paths plus
// their prefixes). Call names are excluded.
std::vector<std::string> expression_entities(const std::string& text);

// Same shape as the native graphs: FunctionDef root plus one node per
// statement, def-use edges, root edges for parameter-touching statements.
FunctionGraph build_script_dfg(const ScriptFunction& fn);

// Adds Sanitizer roles from the script pattern set; argument-count
// comparisons (arguments.length) also count.
void tag_script_roles(FunctionGraph& graph, const RuleSet& rules);

// A call into a require()'d native binding object.
struct NativeCallRef {
    std::string handle;
    std::string exportedName;
    std::string function; // canonical enclosing script function
    int stmtIndex = 0;
    SourceLoc loc;
};

// Resolves require('bindings')(...) and direct require of .node paths to
// handle variables, then reports every <handle>.<name>(...) call. Dynamic
// require arguments produce a diagnostic.
std::vector<NativeCallRef> find_native_call_sites(
    const JsParseResult& parsed,
    std::vector<std::string>* diagnostics = nullptr);

struct CallEdge {
    std::string caller;   // canonical name
    std::string callee;   // normalized call name
    std::string resolved; // canonical callee function, empty when external
    std::vector<std::string> argTexts;
    SourceLoc loc;
    bool routeHandler = false; // resolved via a route-registration argument
};

struct CallGraph {
    std::vector<CallEdge> edges;
    std::vector<const ScriptFunction*> functions;

    const ScriptFunction* find(const std::string& canonical) const;
};

// Plain-name calls resolve to same-application functions; function
// literals or named handlers passed to get/post/put/delete/use/all become
// routeHandler edges.
CallGraph build_call_graph(const std::vector<JsParseResult>& files);

} // namespace xbound

#endif
