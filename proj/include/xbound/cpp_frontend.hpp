#ifndef XBOUND_CPP_FRONTEND_HPP
#define XBOUND_CPP_FRONTEND_HPP

#include <string>
#include <unordered_map>
#include <vector>

#include "xbound/graph.hpp"
#include "xbound/lex.hpp"
#include "xbound/rules.hpp"

namespace xbound {

struct NativeParam {
    std::string name;
    std::string typeText;
};

// One body statement with its approximated def-use facts. Statements
// outside the subset grammar are opaque: every identifier is a read and
// an identifier left of '=' is a definition.
struct NativeStatement {
    SourceLoc loc;
    std::string text;
    NodeKind kind = NodeKind::Statement;
    std::vector<std::string> defs;
    std::vector<std::string> uses;
    std::vector<std::string> callees; // normalized, e.g. "node::Buffer::Data"
    bool comparison = false;          // statement contains a comparison op
};

struct NativeFunction {
    std::string symbol;
    std::vector<NativeParam> params;
    std::vector<NativeStatement> body;
    SourceLoc loc;
};

enum class ApiStyle { NApi, Nan, Ruby, Python };

const char* api_style_name(ApiStyle s);

struct BindingEntry {
    std::string exportedName;
    std::string nativeSymbol;
    ApiStyle style;
    SourceLoc loc;
};

// A call expression anywhere in the file; registration extraction works
// over these.
struct CppCallSite {
    std::string callee; // normalized
    std::vector<lex::Token> args; // tokens between the outer parentheses
    SourceLoc loc;
};

struct CppParseResult {
    std::string file;
    std::vector<NativeFunction> functions;
    std::vector<CppCallSite> callSites;
    // aggregate initializers at file scope, keyed by declared name
    std::unordered_map<std::string, std::vector<lex::Token>> initializers;
    std::vector<std::string> includes;
    std::vector<std::string> diagnostics;
};

CppParseResult parse_native(const std::string& source,
                            const std::string& path);
// Throws std::runtime_error when the file cannot be read.
CppParseResult parse_native_file(const std::string& path);

// Flow-insensitive def-use graph. Root is the FunctionDef node with an
// edge to every statement referencing a parameter or indexing
// info[*]/args[*].
FunctionGraph build_native_dfg(const NativeFunction& fn);

std::vector<BindingEntry> extract_bindings(const CppParseResult& parsed,
                                           std::vector<std::string>* diagnostics = nullptr);

// Re-derives normalized call names from a rendered statement snippet.
std::vector<std::string> statement_callees(const std::string& text);

// Adds Sink/Sanitizer roles from the native pattern sets; argument-count
// comparisons (argc, info.Length(), args.Length()) count as sanitizers.
// Nodes and edges are untouched.
void tag_native_roles(FunctionGraph& graph, const RuleSet& rules);

} // namespace xbound

#endif
