#include "xbound/graph.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>
#include <stdexcept>

namespace xbound {

std::string SourceLoc::str() const {
    return file + ":" + std::to_string(line);
}

int FunctionGraph::add_node(GraphNode node) {
    if (index_.count(node.id))
        throw std::invalid_argument("duplicate node id " +
                                    std::to_string(node.id));
    index_[node.id] = nodes_.size();
    int id = node.id;
    nodes_.push_back(std::move(node));
    return id;
}

void FunctionGraph::add_edge(FlowEdge edge) {
    edges_.push_back(std::move(edge));
}

const GraphNode* FunctionGraph::find_node(int id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &nodes_[it->second];
}

GraphNode* FunctionGraph::find_node(int id) {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &nodes_[it->second];
}

std::string FunctionGraph::validate() const {
    int roots = 0;
    for (const auto& n : nodes_) {
        if (n.has_role(RoleRoot)) {
            ++roots;
            if (n.kind != NodeKind::FunctionDef)
                return "root node is not a FunctionDef";
        }
    }
    if (roots != 1)
        return "expected exactly one Root node, found " +
               std::to_string(roots);
    if (!find_node(root_) || !find_node(root_)->has_role(RoleRoot))
        return "root id does not name the Root node";
    for (const auto& e : edges_) {
        if (!find_node(e.from) || !find_node(e.to))
            return "dangling edge endpoint";
    }
    return {};
}

CrossLanguageGraph::CrossLanguageGraph(const FunctionGraph& highLevel,
                                       int callNodeId,
                                       const FunctionGraph& native) {
    const GraphNode* call = highLevel.find_node(callNodeId);
    if (!call)
        throw std::invalid_argument("boundary call node not in graph");

    merged_.set_name(highLevel.name() + "+" + native.name());
    int maxId = -1;
    for (const auto& n : highLevel.nodes()) {
        merged_.add_node(n);
        maxId = std::max(maxId, n.id);
    }
    for (const auto& e : highLevel.edges())
        merged_.add_edge(e);
    merged_.set_root(highLevel.root());

    int offset = maxId + 1;
    for (const auto& n : native.nodes()) {
        GraphNode copy = n;
        copy.id = n.id + offset;
        copy.roles &= ~RoleRoot; // only the high-level root stays Root
        remap_[n.id] = copy.id;
        merged_.add_node(std::move(copy));
    }
    for (const auto& e : native.edges()) {
        FlowEdge copy = e;
        copy.from = remap_.at(e.from);
        copy.to = remap_.at(e.to);
        merged_.add_edge(std::move(copy));
    }

    boundary_.from = callNodeId;
    boundary_.to = remap_.at(native.root());
    boundary_.variable.clear();
    boundary_.kind = EdgeKind::CrossLanguageCall;
    merged_.add_edge(boundary_);
}

int CrossLanguageGraph::remap_native(int originalId) const {
    auto it = remap_.find(originalId);
    if (it == remap_.end())
        throw std::invalid_argument("unknown native node id");
    return it->second;
}

namespace {

std::unordered_map<int, std::vector<int>> adjacency(const FunctionGraph& g) {
    std::unordered_map<int, std::vector<int>> adj;
    for (const auto& e : g.edges())
        adj[e.from].push_back(e.to);
    return adj;
}

// All nodes reachable from `from` (inclusive).
std::vector<int> bfs(const FunctionGraph& g, int from) {
    auto adj = adjacency(g);
    std::vector<int> order;
    std::unordered_map<int, bool> seen;
    std::deque<int> work{from};
    seen[from] = true;
    while (!work.empty()) {
        int cur = work.front();
        work.pop_front();
        order.push_back(cur);
        auto it = adj.find(cur);
        if (it == adj.end())
            continue;
        for (int next : it->second) {
            if (!seen[next]) {
                seen[next] = true;
                work.push_back(next);
            }
        }
    }
    return order;
}

} // namespace

std::vector<int> reachable(const FunctionGraph& graph, int from,
                           Role targetRole) {
    if (!graph.find_node(from))
        throw std::invalid_argument("unknown node id " + std::to_string(from));
    std::vector<int> out;
    for (int id : bfs(graph, from)) {
        if (graph.find_node(id)->has_role(targetRole))
            out.push_back(id);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> reachable(const CrossLanguageGraph& graph, int from,
                           Role targetRole) {
    return reachable(graph.merged(), from, targetRole);
}

const char* verdict_name(Verdict v) {
    switch (v) {
    case Verdict::Vulnerable: return "Vulnerable";
    case Verdict::SanitizedNative: return "SanitizedNative";
    case Verdict::SanitizedHighLevel: return "SanitizedHighLevel";
    case Verdict::SanitizedBoth: return "SanitizedBoth";
    case Verdict::NoFlow: return "NoFlow";
    }
    return "?";
}

Verdict judge(const FunctionGraph& graph) {
    auto sinks = reachable(graph, graph.root(), RoleSink);
    if (sinks.empty())
        return Verdict::NoFlow;
    auto sans = reachable(graph, graph.root(), RoleSanitizer);
    if (sans.empty())
        return Verdict::Vulnerable;
    bool native = false, high = false;
    for (int id : sans) {
        if (graph.find_node(id)->language == Language::Native)
            native = true;
        else
            high = true;
    }
    if (native && high)
        return Verdict::SanitizedBoth;
    return native ? Verdict::SanitizedNative : Verdict::SanitizedHighLevel;
}

Verdict judge(const CrossLanguageGraph& graph) {
    return judge(graph.merged());
}

namespace {

const char* kind_name(NodeKind k) {
    switch (k) {
    case NodeKind::FunctionDef: return "FUNCTION";
    case NodeKind::Statement: return "STMT";
    case NodeKind::Call: return "CALL";
    case NodeKind::NameRef: return "NAME";
    case NodeKind::Return: return "RETURN";
    case NodeKind::Other: return "OTHER";
    }
    return "?";
}

std::string dot_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '"' || c == '\\')
            out.push_back('\\');
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out.push_back(c);
    }
    return out;
}

} // namespace

std::string emit_dot(const FunctionGraph& graph, const std::string& name) {
    std::ostringstream os;
    os << "digraph " << name << " {\n";

    std::vector<const GraphNode*> nodes;
    for (const auto& n : graph.nodes())
        nodes.push_back(&n);
    std::sort(nodes.begin(), nodes.end(),
              [](const GraphNode* a, const GraphNode* b) {
                  return a->id < b->id;
              });
    for (const GraphNode* n : nodes) {
        os << "  \"" << n->id << "\" [label=\"" << kind_name(n->kind) << " "
           << n->loc.line << " ," << dot_escape(n->label) << "\",color="
           << (n->language == Language::HighLevel ? "blue" : "green")
           << "]\n";
    }

    // Edges sorted by (from, to, label) for byte determinism.
    std::vector<const FlowEdge*> edges;
    for (const auto& e : graph.edges())
        edges.push_back(&e);
    std::sort(edges.begin(), edges.end(),
              [](const FlowEdge* a, const FlowEdge* b) {
                  return std::tie(a->from, a->to, a->variable) <
                         std::tie(b->from, b->to, b->variable);
              });
    for (const FlowEdge* e : edges) {
        std::string label = e->kind == EdgeKind::CrossLanguageCall
                                ? " Cross-language call"
                                : e->variable;
        os << "  \"" << e->from << "\" -> \"" << e->to << "\" [label=\""
           << dot_escape(label) << "\"]\n";
    }
    os << "}\n";
    return os.str();
}

std::string emit_dot(const CrossLanguageGraph& graph,
                     const std::string& name) {
    return emit_dot(graph.merged(), name);
}

std::vector<int> witness_path(const FunctionGraph& graph) {
    auto adj = adjacency(graph);
    for (auto& [id, next] : adj)
        std::sort(next.begin(), next.end());

    std::map<int, int> dist;   // ordered so sinks scan deterministically
    std::unordered_map<int, int> pred;
    std::deque<int> work{graph.root()};
    dist[graph.root()] = 0;
    while (!work.empty()) {
        int cur = work.front();
        work.pop_front();
        for (int next : adj[cur]) {
            if (!dist.count(next)) {
                dist[next] = dist[cur] + 1;
                pred[next] = cur;
                work.push_back(next);
            }
        }
    }

    int best = -1;
    for (const auto& [id, d] : dist) {
        const GraphNode* n = graph.find_node(id);
        if (!n->has_role(RoleSink))
            continue;
        if (best == -1 || d < dist[best] || (d == dist[best] && id < best))
            best = id;
    }
    if (best == -1)
        return {};
    std::vector<int> path;
    for (int cur = best; ; cur = pred[cur]) {
        path.push_back(cur);
        if (cur == graph.root())
            break;
    }
    std::reverse(path.begin(), path.end());
    return path;
}

} // namespace xbound
