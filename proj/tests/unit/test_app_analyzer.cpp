#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <set>

#include "helpers.hpp"
#include "xbound/app_analyzer.hpp"

using namespace xbound;
using namespace testutil;

namespace {

std::vector<JsParseResult> parse_tree(const std::string& root) {
    namespace fs = std::filesystem;
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(root))
        if (entry.is_regular_file() && entry.path().extension() == ".js")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<JsParseResult> parsed;
    for (const fs::path& p : files)
        parsed.push_back(parse_script_file(p.generic_string()));
    return parsed;
}

AppRuleSpec rule_named(const std::string& name) {
    for (const AppRuleSpec& r : builtin_app_rules())
        if (r.apiName == name)
            return r;
    REQUIRE(false);
    return {};
}

std::set<std::string> entity_names(const InfluenceSet& set) {
    std::set<std::string> names;
    for (const InfluenceEntity& e : set.entities)
        names.insert(e.name);
    return names;
}

} // namespace

TEST_CASE("a destructured request member reaches the query API") {
    auto files = parse_tree(fixture("apps/gallery"));
    auto findings = analyze_app(files, builtin_app_rules());
    REQUIRE(findings.size() == 1);
    const AppFinding& f = findings[0];
    CHECK(f.api == "run");
    CHECK(f.matchedSource == "req.body.category");
    CHECK(f.truncated == false);
    REQUIRE(f.callerChain.size() == 1);
    CHECK(f.callerChain[0].rfind("anon@", 0) == 0);
}

TEST_CASE("value guards do not silence the tracked flow") {
    // the ride service checks its numbers before inserting; the tracked
    // values still originate from the request, so it stays reported
    auto files = parse_tree(fixture("apps/rides"));
    auto findings = analyze_app(files, builtin_app_rules());
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].api == "run");
    CHECK(findings[0].matchedSource == "req");
}

TEST_CASE("one finding per application across the service corpus") {
    auto files = parse_tree(fixture("apps/seven"));
    auto findings = analyze_app(files, builtin_app_rules());
    CHECK(findings.size() == 7);
    std::set<std::string> apis;
    for (const AppFinding& f : findings)
        apis.insert(f.api);
    CHECK(apis == std::set<std::string>{"run", "parseXml", "powm",
                                        "setTimezone", "query", "encode",
                                        "toBigIntLE"});
}

TEST_CASE("literal-only arguments produce no findings") {
    auto files = parse_tree(fixture("apps/clean"));
    CHECK(analyze_app(files, builtin_app_rules()).empty());
}

TEST_CASE("call sites require the tracked position to be filled") {
    auto files = parse_tree(fixture("apps/clean"));
    const AppRuleSpec run = rule_named("run");
    CHECK(find_call_sites(files, run).empty());

    auto gallery = parse_tree(fixture("apps/gallery"));
    CHECK(find_call_sites(gallery, run).size() == 1);
}

TEST_CASE("depth zero equals the single-function walk") {
    auto files = parse_tree(fixture("apps/seven/bignum-app"));
    CallGraph graph = build_call_graph(files);
    const AppRuleSpec powm = rule_named("powm");
    auto sites = find_call_sites(files, powm);
    REQUIRE(sites.size() == 1);

    InfluenceSet inter0 = backward_inter(graph, sites[0], powm, 0);
    const ScriptFunction* fn = graph.find(sites[0].function);
    REQUIRE(fn != nullptr);
    InfluenceSet intra = backward_intra(
        *fn, sites[0].argTexts[powm.tracked_index()]);
    CHECK(entity_names(inter0) == entity_names(intra));
    CHECK(inter0.truncated == true); // a caller exists beyond the limit
}

TEST_CASE("influence sets grow monotonically with depth") {
    auto files = parse_tree(fixture("apps/seven/bignum-app"));
    CallGraph graph = build_call_graph(files);
    const AppRuleSpec powm = rule_named("powm");
    auto sites = find_call_sites(files, powm);
    REQUIRE(sites.size() == 1);

    std::set<std::string> previous;
    for (int depth = 0; depth <= 3; ++depth) {
        auto names =
            entity_names(backward_inter(graph, sites[0], powm, depth));
        for (const std::string& n : previous)
            CHECK(names.count(n) == 1);
        previous = std::move(names);
    }
    // the deeper walk must surface the request field from the caller
    CHECK(previous.count("req.body.exp") == 1);
}

TEST_CASE("the walk ascends through intermediate helpers") {
    JsParseResult parsed = parse_script(
        "function store(v) { db.run('INSERT', v); }\n"
        "function relay(x) { store(x); }\n"
        "function handle(req, res) { relay(req.body.name); }\n"
        "app.post('/n', handle);\n",
        "threedeep.js");
    const AppRuleSpec run = rule_named("run");
    auto findings = analyze_app({parsed}, {run});
    REQUIRE(findings.size() == 1);
    // the bare req prefix sorts first among the surfaced entities
    CHECK(findings[0].matchedSource == "req");
    CHECK(findings[0].callerChain ==
          std::vector<std::string>{"store", "relay", "handle"});

    std::vector<JsParseResult> files{parsed};
    CallGraph graph = build_call_graph(files);
    auto names = entity_names(
        backward_inter(graph, find_call_sites(files, run)[0], run, 16));
    CHECK(names.count("req.body.name") == 1);

    // oracle: inlining relay by hand changes nothing
    JsParseResult inlined = parse_script(
        "function store(v) { db.run('INSERT', v); }\n"
        "function handle(req, res) { store(req.body.name); }\n"
        "app.post('/n', handle);\n",
        "twodeep.js");
    auto inlinedFindings = analyze_app({inlined}, {run});
    REQUIRE(inlinedFindings.size() == 1);
    CHECK(inlinedFindings[0].matchedSource == findings[0].matchedSource);
}

TEST_CASE("recursive call chains terminate") {
    JsParseResult parsed = parse_script(
        "function spin(v) {\n"
        "    db.run('X', v);\n"
        "    spin(v);\n"
        "}\n"
        "function boot(req, res) { spin(req.body.seed); }\n"
        "app.post('/s', boot);\n",
        "recur.js");
    const AppRuleSpec run = rule_named("run");
    auto findings = analyze_app({parsed}, {run});
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].matchedSource == "req");
}

TEST_CASE("results of unrelated calls become opaque leaves") {
    JsParseResult parsed = parse_script(
        "function save(req, res) {\n"
        "    const clean = sanitize(req.body.text);\n"
        "    db.run('INSERT', clean);\n"
        "}\n"
        "app.post('/t', save);\n",
        "opaque.js");
    std::vector<JsParseResult> files{parsed};
    CallGraph graph = build_call_graph(files);
    const AppRuleSpec run = rule_named("run");
    auto sites = find_call_sites(files, run);
    REQUIRE(sites.size() == 1);
    InfluenceSet set = backward_inter(graph, sites[0], run, 16);
    auto names = entity_names(set);
    CHECK(names.count("sanitize()") == 1);
    CHECK(names.count("req.body.text") == 0);
    CHECK_FALSE(evaluate(run, set));
}
