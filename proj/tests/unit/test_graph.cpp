#include <doctest.h>

#include <map>
#include <set>

#include "helpers.hpp"
#include "xbound/graph.hpp"

using namespace xbound;
using namespace testutil;

namespace {

GraphNode make_node(int id, Language lang, unsigned roles,
                    NodeKind kind = NodeKind::Statement) {
    GraphNode n;
    n.id = id;
    n.language = lang;
    n.kind = kind;
    n.label = "n" + std::to_string(id);
    n.loc = SourceLoc{"f", id + 1, 0};
    n.roles = roles;
    return n;
}

FunctionGraph line_graph(const std::vector<unsigned>& roles,
                         Language lang = Language::Native) {
    FunctionGraph g("line");
    for (std::size_t i = 0; i < roles.size(); ++i)
        g.add_node(make_node(static_cast<int>(i), lang, roles[i],
                             i == 0 ? NodeKind::FunctionDef
                                    : NodeKind::Statement));
    g.set_root(0);
    for (std::size_t i = 0; i + 1 < roles.size(); ++i)
        g.add_edge(FlowEdge{static_cast<int>(i), static_cast<int>(i + 1),
                            "v", EdgeKind::DefUse});
    return g;
}

} // namespace

TEST_CASE("two-condition rule on hand graphs") {
    CHECK(judge(line_graph({RoleRoot, 0, RoleSink})) == Verdict::Vulnerable);
    CHECK(judge(line_graph({RoleRoot, 0, 0})) == Verdict::NoFlow);

    // sink present but unreachable from the root
    FunctionGraph g("island");
    g.add_node(make_node(0, Language::Native, RoleRoot,
                         NodeKind::FunctionDef));
    g.add_node(make_node(1, Language::Native, 0));
    g.add_node(make_node(2, Language::Native, RoleSink));
    g.set_root(0);
    g.add_edge(FlowEdge{0, 1, "v", EdgeKind::DefUse});
    CHECK(judge(g) == Verdict::NoFlow);

    CHECK(judge(line_graph({RoleRoot, RoleSanitizer, RoleSink})) ==
          Verdict::SanitizedNative);
    CHECK(judge(line_graph({RoleRoot, RoleSanitizer, RoleSink},
                           Language::HighLevel)) ==
          Verdict::SanitizedHighLevel);
}

TEST_CASE("a reachable sanitizer suppresses every sink in the graph") {
    // sanitizer on a branch that does not lead to the sink
    FunctionGraph g("branch");
    g.add_node(make_node(0, Language::Native, RoleRoot,
                         NodeKind::FunctionDef));
    g.add_node(make_node(1, Language::Native, RoleSanitizer));
    g.add_node(make_node(2, Language::Native, RoleSink));
    g.set_root(0);
    g.add_edge(FlowEdge{0, 1, "a", EdgeKind::DefUse});
    g.add_edge(FlowEdge{0, 2, "b", EdgeKind::DefUse});
    CHECK(judge(g) == Verdict::SanitizedNative);
}

TEST_CASE("sanitizers on both sides classify as SanitizedBoth") {
    FunctionGraph g("both");
    g.add_node(make_node(0, Language::HighLevel, RoleRoot,
                         NodeKind::FunctionDef));
    g.add_node(make_node(1, Language::HighLevel, RoleSanitizer));
    g.add_node(make_node(2, Language::Native, RoleSanitizer));
    g.add_node(make_node(3, Language::Native, RoleSink));
    g.set_root(0);
    g.add_edge(FlowEdge{0, 1, "a", EdgeKind::DefUse});
    g.add_edge(FlowEdge{1, 2, "a", EdgeKind::DefUse});
    g.add_edge(FlowEdge{2, 3, "a", EdgeKind::DefUse});
    CHECK(judge(g) == Verdict::SanitizedBoth);
}

TEST_CASE("reachable includes the start node and sorts by id") {
    FunctionGraph g("start");
    g.add_node(make_node(0, Language::Native, RoleRoot | RoleSink,
                         NodeKind::FunctionDef));
    g.add_node(make_node(1, Language::Native, RoleSink));
    g.set_root(0);
    g.add_edge(FlowEdge{0, 1, "v", EdgeKind::DefUse});
    auto sinks = reachable(g, 0, RoleSink);
    CHECK(sinks == std::vector<int>{0, 1});
}

TEST_CASE("traversal terminates on cycles") {
    FunctionGraph g("cycle");
    g.add_node(make_node(0, Language::Native, RoleRoot,
                         NodeKind::FunctionDef));
    g.add_node(make_node(1, Language::Native, 0));
    g.add_node(make_node(2, Language::Native, RoleSink));
    g.set_root(0);
    g.add_edge(FlowEdge{0, 1, "v", EdgeKind::DefUse});
    g.add_edge(FlowEdge{1, 0, "v", EdgeKind::DefUse});
    g.add_edge(FlowEdge{1, 2, "v", EdgeKind::DefUse});
    CHECK(judge(g) == Verdict::Vulnerable);
    CHECK(witness_path(g) == std::vector<int>{0, 1, 2});
}

TEST_CASE("witness path is shortest, ties broken by smallest id") {
    FunctionGraph g("tie");
    g.add_node(make_node(0, Language::Native, RoleRoot,
                         NodeKind::FunctionDef));
    for (int i = 1; i <= 4; ++i)
        g.add_node(make_node(i, Language::Native, 0));
    g.add_node(make_node(5, Language::Native, RoleSink));
    g.set_root(0);
    // long route 0-1-2-3-5, two short routes 0-4-5 and 0-2-5
    g.add_edge(FlowEdge{0, 1, "v", EdgeKind::DefUse});
    g.add_edge(FlowEdge{1, 2, "v", EdgeKind::DefUse});
    g.add_edge(FlowEdge{2, 3, "v", EdgeKind::DefUse});
    g.add_edge(FlowEdge{3, 5, "v", EdgeKind::DefUse});
    g.add_edge(FlowEdge{0, 4, "v", EdgeKind::DefUse});
    g.add_edge(FlowEdge{4, 5, "v", EdgeKind::DefUse});
    g.add_edge(FlowEdge{0, 2, "v", EdgeKind::DefUse});
    g.add_edge(FlowEdge{2, 5, "v", EdgeKind::DefUse});
    CHECK(witness_path(g) == std::vector<int>{0, 2, 5});

    CHECK(witness_path(line_graph({RoleRoot, 0, 0})).empty());
}

TEST_CASE("validate flags structural damage") {
    CHECK(line_graph({RoleRoot, 0, RoleSink}).validate().empty());

    FunctionGraph dangling = line_graph({RoleRoot, 0});
    dangling.add_edge(FlowEdge{1, 99, "v", EdgeKind::DefUse});
    CHECK_FALSE(dangling.validate().empty());

    FunctionGraph rootless("rootless");
    rootless.add_node(make_node(0, Language::Native, 0));
    CHECK_FALSE(rootless.validate().empty());
}

TEST_CASE("cross-language merge keeps id sets disjoint") {
    FunctionGraph script("caller");
    script.add_node(make_node(0, Language::HighLevel, RoleRoot,
                              NodeKind::FunctionDef));
    script.add_node(make_node(1, Language::HighLevel, 0));
    script.set_root(0);
    script.add_edge(FlowEdge{0, 1, "x", EdgeKind::DefUse});

    FunctionGraph native = line_graph({RoleRoot, 0, RoleSink});
    CrossLanguageGraph merged(script, 1, native);

    std::set<int> ids;
    for (const auto& n : merged.merged().nodes())
        CHECK(ids.insert(n.id).second);
    CHECK(ids.size() == 5);

    // only the high-level root keeps the Root role
    int roots = 0;
    for (const auto& n : merged.merged().nodes())
        if (n.has_role(RoleRoot))
            ++roots;
    CHECK(roots == 1);
    CHECK(merged.merged().root() == 0);

    const FlowEdge& b = merged.boundary();
    CHECK(b.kind == EdgeKind::CrossLanguageCall);
    CHECK(b.from == 1);
    CHECK(b.to == merged.remap_native(0));

    CHECK(judge(merged) == Verdict::Vulnerable);
}

TEST_CASE("dot output is deterministic and labels the boundary edge") {
    FunctionGraph script("caller");
    script.add_node(make_node(0, Language::HighLevel, RoleRoot,
                              NodeKind::FunctionDef));
    script.add_node(make_node(1, Language::HighLevel, 0));
    script.set_root(0);
    script.add_edge(FlowEdge{0, 1, "x", EdgeKind::DefUse});
    FunctionGraph native = line_graph({RoleRoot, RoleSink});
    CrossLanguageGraph merged(script, 1, native);

    std::string a = emit_dot(merged, "g");
    std::string b = emit_dot(merged, "g");
    CHECK(a == b);
    CHECK(a.find("[label=\" Cross-language call\"]") != std::string::npos);
    CHECK(a.find("color=blue") != std::string::npos);
    CHECK(a.find("color=green") != std::string::npos);

    DotCounts counts = parse_dot_counts(a);
    CHECK(counts.nodes == 4);
    // one script edge, one native edge, one boundary edge
    CHECK(counts.edges == 3);
}

TEST_CASE("dot round-trip counts match the graph") {
    std::mt19937 rng(7);
    for (int i = 0; i < 50; ++i) {
        FunctionGraph g = random_graph(rng, 30);
        DotCounts counts = parse_dot_counts(emit_dot(g, "g"));
        CHECK(counts.nodes == static_cast<int>(g.nodes().size()));
        CHECK(counts.edges == static_cast<int>(g.edges().size()));
    }
}

TEST_CASE("judge agrees with a transitive-closure oracle") {
    std::mt19937 rng(42);
    for (int i = 0; i < 300; ++i) {
        FunctionGraph g = random_graph(rng, 40);
        CHECK(judge(g) == brute_force_judge(g));
    }
}

TEST_CASE("adding edges never shrinks the reachable set") {
    std::mt19937 rng(9);
    for (int i = 0; i < 100; ++i) {
        FunctionGraph g = random_graph(rng, 25);
        auto before = reachable(g, g.root(), RoleSink);
        std::uniform_int_distribution<int> pick(
            0, static_cast<int>(g.nodes().size()) - 1);
        g.add_edge(FlowEdge{pick(rng), pick(rng), "w", EdgeKind::DefUse});
        auto after = reachable(g, g.root(), RoleSink);
        std::set<int> afterSet(after.begin(), after.end());
        for (int id : before)
            CHECK(afterSet.count(id) == 1);
    }
}

TEST_CASE("verdict is invariant under node id relabeling") {
    std::mt19937 rng(11);
    for (int i = 0; i < 100; ++i) {
        FunctionGraph g = random_graph(rng, 25);
        FunctionGraph h("remapped");
        std::map<int, int> remap;
        for (const auto& n : g.nodes())
            remap[n.id] = n.id * 7 + 3;
        for (const auto& n : g.nodes()) {
            GraphNode copy = n;
            copy.id = remap[n.id];
            h.add_node(copy);
        }
        h.set_root(remap[g.root()]);
        for (const auto& e : g.edges())
            h.add_edge(FlowEdge{remap[e.from], remap[e.to], e.variable,
                                e.kind});
        CHECK(judge(g) == judge(h));
    }
}
