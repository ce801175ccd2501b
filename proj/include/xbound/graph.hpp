#ifndef XBOUND_GRAPH_HPP
#define XBOUND_GRAPH_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace xbound {

enum class Language { HighLevel, Native };

enum class NodeKind { FunctionDef, Statement, Call, NameRef, Return, Other };

// Role bits. A node may be both Sink and Sanitizer when matched by both
// pattern sets; the analyses treat the roles independently.
enum Role : unsigned {
    RoleRoot = 1u,
    RoleSink = 2u,
    RoleSanitizer = 4u,
};

struct SourceLoc {
    std::string file;
    int line = 0;   // 1-based
    int column = 0; // 0-based

    std::string str() const;
};

struct GraphNode {
    int id = -1;
    Language language = Language::Native;
    NodeKind kind = NodeKind::Other;
    std::string label; // source-text snippet
    SourceLoc loc;
    unsigned roles = 0;

    bool has_role(Role r) const { return (roles & r) != 0; }
};

enum class EdgeKind { DefUse, CrossLanguageCall };

struct FlowEdge {
    int from = -1;
    int to = -1;
    std::string variable; // flowing variable's name, may be empty
    EdgeKind kind = EdgeKind::DefUse;
};

// Per-function data-flow graph. Nodes are statements and sub-expressions,
// edges are explicit def-use flows. May contain cycles (loops produce back
// edges); all traversals terminate regardless.
class FunctionGraph {
public:
    FunctionGraph() = default;
    explicit FunctionGraph(std::string functionName)
        : name_(std::move(functionName)) {}

    const std::string& name() const { return name_; }
    void set_name(std::string n) { name_ = std::move(n); }

    // Returns the node id. Ids are assigned by the caller and must be
    // unique within the graph.
    int add_node(GraphNode node);
    void add_edge(FlowEdge edge);

    const std::vector<GraphNode>& nodes() const { return nodes_; }
    const std::vector<FlowEdge>& edges() const { return edges_; }
    std::vector<GraphNode>& mutable_nodes() { return nodes_; }

    const GraphNode* find_node(int id) const;
    GraphNode* find_node(int id);

    int root() const { return root_; }
    void set_root(int id) { root_ = id; }

    // Checks structural invariants: unique ids, no dangling edges, root
    // present with role Root and kind FunctionDef. Returns an error
    // description or empty string.
    std::string validate() const;

private:
    std::string name_;
    std::vector<GraphNode> nodes_;
    std::vector<FlowEdge> edges_;
    std::unordered_map<int, std::size_t> index_;
    int root_ = -1;
};

// Two FunctionGraphs joined by a cross-language call edge. Native node ids
// are remapped so the two id sets are disjoint; the remapping table maps
// original native ids to merged ids. Only the high-level root keeps the
// Root role in the merged graph.
class CrossLanguageGraph {
public:
    CrossLanguageGraph(const FunctionGraph& highLevel, int callNodeId,
                       const FunctionGraph& native);

    const FunctionGraph& merged() const { return merged_; }
    const FlowEdge& boundary() const { return boundary_; }
    const std::unordered_map<int, int>& native_id_remap() const {
        return remap_;
    }
    int remap_native(int originalId) const;

private:
    FunctionGraph merged_;
    FlowEdge boundary_;
    std::unordered_map<int, int> remap_;
};

// Worklist breadth-first reachability with a visited set. Returns every
// node carrying targetRole reachable from `from`, sorted by id. Both
// DefUse and CrossLanguageCall edges are traversable. The start node
// itself counts when it carries the role.
std::vector<int> reachable(const FunctionGraph& graph, int from,
                           Role targetRole);
std::vector<int> reachable(const CrossLanguageGraph& graph, int from,
                           Role targetRole);

enum class Verdict {
    Vulnerable,
    SanitizedNative,
    SanitizedHighLevel,
    SanitizedBoth,
    NoFlow,
};

const char* verdict_name(Verdict v);

// The two-condition rule: Vulnerable iff some sink is reachable from the
// root and no sanitizer is. When sanitizers are reachable, classifies by
// which language side contains one. NoFlow iff no sink is reachable.
// Path- and argument-insensitive: any reachable sanitizer suppresses all
// findings in the graph.
Verdict judge(const FunctionGraph& graph);
Verdict judge(const CrossLanguageGraph& graph);

// Byte-deterministic dot serialization: nodes ordered by id, HighLevel
// nodes colored blue, Native ones green, the boundary edge labeled
// " Cross-language call" (leading space as in the upstream dot dumps).
std::string emit_dot(const FunctionGraph& graph, const std::string& name = "g");
std::string emit_dot(const CrossLanguageGraph& graph,
                     const std::string& name = "g");

// Shortest root-to-sink path by edge count, ties broken by smallest node
// id. Empty when no sink is reachable.
std::vector<int> witness_path(const FunctionGraph& graph);

} // namespace xbound

#endif
