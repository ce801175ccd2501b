#ifndef XBOUND_TEST_HELPERS_HPP
#define XBOUND_TEST_HELPERS_HPP

#include <cstdio>
#include <cstdlib>
#include <sys/wait.h>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "xbound/graph.hpp"

namespace testutil {

inline std::string fixture(const std::string& rel) {
    return std::string(FIXTURES_DIR) + "/" + rel;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline std::filesystem::path fresh_temp_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() /
               ("xbound_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

struct CliResult {
    int exit = -1;
    std::string out;
    std::string err;
};

// Runs the built CLI with a shell-quoted argument string.
inline CliResult run_cli(const std::string& args,
                         const std::string& envPrefix = "") {
    auto dir = std::filesystem::temp_directory_path();
    static int counter = 0;
    std::string tag = std::to_string(::getpid()) + "_" +
                      std::to_string(counter++);
    std::string outPath = (dir / ("xbound_out_" + tag)).string();
    std::string errPath = (dir / ("xbound_err_" + tag)).string();
    std::string cmd = envPrefix + " \"" + XBOUND_CLI_PATH + "\" " + args +
                      " >" + outPath + " 2>" + errPath;
    int status = std::system(cmd.c_str());
    CliResult r;
    r.exit = status == -1 ? -1 : WEXITSTATUS(status);
    r.out = read_file(outPath);
    r.err = read_file(errPath);
    std::filesystem::remove(outPath);
    std::filesystem::remove(errPath);
    return r;
}

inline bool has_edge(const xbound::FunctionGraph& g, int from, int to,
                     const std::string& var) {
    for (const auto& e : g.edges())
        if (e.from == from && e.to == to && e.variable == var)
            return true;
    return false;
}

// Independent check of the two-condition rule: transitive closure by
// repeated squaring over an adjacency matrix, nothing shared with the
// library's BFS.
inline xbound::Verdict brute_force_judge(const xbound::FunctionGraph& g) {
    using namespace xbound;
    std::vector<int> ids;
    for (const auto& n : g.nodes())
        ids.push_back(n.id);
    std::size_t n = ids.size();
    auto idx = [&](int id) {
        for (std::size_t i = 0; i < n; ++i)
            if (ids[i] == id)
                return i;
        return n;
    };
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i)
        reach[i][i] = true;
    for (const auto& e : g.edges())
        reach[idx(e.from)][idx(e.to)] = true;
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (reach[i][j])
                    for (std::size_t k = 0; k < n; ++k)
                        if (reach[j][k] && !reach[i][k]) {
                            reach[i][k] = true;
                            changed = true;
                        }
    }
    std::size_t r = idx(g.root());
    bool sink = false, sanNative = false, sanHigh = false;
    for (std::size_t j = 0; j < n; ++j) {
        if (!reach[r][j])
            continue;
        const GraphNode* node = g.find_node(ids[j]);
        if (node->has_role(RoleSink))
            sink = true;
        if (node->has_role(RoleSanitizer)) {
            if (node->language == Language::Native)
                sanNative = true;
            else
                sanHigh = true;
        }
    }
    if (!sink)
        return Verdict::NoFlow;
    if (sanNative && sanHigh)
        return Verdict::SanitizedBoth;
    if (sanNative)
        return Verdict::SanitizedNative;
    if (sanHigh)
        return Verdict::SanitizedHighLevel;
    return Verdict::Vulnerable;
}

inline xbound::FunctionGraph random_graph(std::mt19937& rng, int maxNodes) {
    using namespace xbound;
    std::uniform_int_distribution<int> nodeCount(1, maxNodes);
    int n = nodeCount(rng);
    FunctionGraph g("random");
    for (int i = 0; i < n; ++i) {
        GraphNode node;
        node.id = i;
        node.language = rng() % 2 ? Language::Native : Language::HighLevel;
        node.kind = i == 0 ? NodeKind::FunctionDef : NodeKind::Statement;
        node.label = "n" + std::to_string(i);
        if (i == 0) {
            node.roles = RoleRoot;
        } else {
            if (rng() % 4 == 0)
                node.roles |= RoleSink;
            if (rng() % 5 == 0)
                node.roles |= RoleSanitizer;
        }
        g.add_node(std::move(node));
    }
    g.set_root(0);
    std::uniform_int_distribution<int> pick(0, n - 1);
    int edges = n > 1 ? static_cast<int>(rng() % (2 * n)) : 0;
    for (int e = 0; e < edges; ++e)
        g.add_edge(xbound::FlowEdge{pick(rng), pick(rng), "v",
                                    xbound::EdgeKind::DefUse});
    return g;
}

// Minimal dot reader: counts node and edge statements.
struct DotCounts {
    int nodes = 0;
    int edges = 0;
};

inline DotCounts parse_dot_counts(const std::string& text) {
    DotCounts c;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.find("->") != std::string::npos)
            ++c.edges;
        else if (line.find("[label=") != std::string::npos)
            ++c.nodes;
    }
    return c;
}

} // namespace testutil

#endif
