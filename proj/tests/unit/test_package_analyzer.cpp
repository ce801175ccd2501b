#include <doctest.h>

#include <fstream>

#include "helpers.hpp"
#include "xbound/package_analyzer.hpp"

using namespace xbound;
using namespace testutil;

namespace {

LoadedRules defaults() {
    return LoadedRules{default_rules(), builtin_app_rules()};
}

void write_file(const std::filesystem::path& path,
                const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

bool ends_with(const std::string& s, const std::string& tail) {
    return s.size() >= tail.size() &&
           s.compare(s.size() - tail.size(), tail.size(), tail) == 0;
}

bool has_diagnostic(const PackageReport& report, const std::string& text) {
    for (const std::string& d : report.diagnostics)
        if (d.find(text) != std::string::npos)
            return true;
    return false;
}

const NativeFunction* find_fn(const CppParseResult& parsed,
                              const std::string& symbol) {
    for (const NativeFunction& fn : parsed.functions)
        if (fn.symbol == symbol)
            return &fn;
    return nullptr;
}

// minimal one-export package with an unchecked int conversion
const char* kSinkNative =
    "#include <node_api.h>\n"
    "napi_value Read(napi_env env, napi_callback_info info) {\n"
    "    size_t argc = 1;\n"
    "    napi_value args[1];\n"
    "    napi_get_cb_info(env, info, &argc, args, NULL, NULL);\n"
    "    int32_t v;\n"
    "    napi_get_value_int32(env, args[0], &v);\n"
    "    return NULL;\n"
    "}\n"
    "napi_value Init(napi_env env, napi_value exports) {\n"
    "    napi_property_descriptor desc = {\"read\", NULL, Read, NULL,\n"
    "                                     NULL, NULL, napi_default, NULL};\n"
    "    napi_define_properties(env, exports, 1, &desc);\n"
    "    return exports;\n"
    "}\n";

} // namespace

TEST_CASE("an unchecked string conversion flags the whole export") {
    PackageReport report =
        analyze_package(fixture("corpus/nativepad"), defaults());
    CHECK(report.id == "nativepad");
    CHECK(report.timedOut == false);
    CHECK(report.diagnostics.empty());

    CHECK(report.inventory.fileCounts.at(".cc") == 1);
    CHECK(report.inventory.fileCounts.at(".js") == 1);
    CHECK(report.inventory.headers ==
          std::vector<std::string>{"node_api.h"});
    CHECK(report.inventory.bindingCount == 1);
    CHECK(report.inventory.directExport == false);

    REQUIRE(report.bindings.size() == 1);
    CHECK(report.bindings[0].exportedName == "Pad");
    CHECK(report.bindings[0].nativeSymbol == "Pad");
    CHECK(report.bindings[0].style == ApiStyle::NApi);

    REQUIRE(report.findings.size() == 1);
    const Finding& f = report.findings[0];
    CHECK(f.kind == "cross");
    CHECK(f.verdict == Verdict::Vulnerable);
    CHECK(f.misuse == MisuseId::M3);
    CHECK(f.exportedName == "Pad");
    CHECK(f.scriptFunction == "exports");
    CHECK(f.nativeFunction == "Pad");
    CHECK(f.witness == std::vector<int>{0, 3, 4, 10});
    CHECK(ends_with(f.sink, "pad.cc:11"));
    CHECK(f.sanitizers.empty());
}

TEST_CASE("a typeof guard in the wrapper downgrades the verdict") {
    PackageReport report =
        analyze_package(fixture("variants/nativepad-sanitized"),
                        defaults());
    REQUIRE(report.findings.size() == 1);
    const Finding& f = report.findings[0];
    CHECK(f.verdict == Verdict::SanitizedHighLevel);
    CHECK(f.misuse == MisuseId::M3);
    CHECK(f.witness == std::vector<int>{0, 3, 4, 10});
    CHECK(ends_with(f.sink, "pad.cc:11"));
    REQUIRE(f.sanitizers.size() == 1);
    CHECK(ends_with(f.sanitizers[0], "index.js:3"));
}

TEST_CASE("verdicts across the canonical corpus") {
    PackageReport zlib =
        analyze_package(fixture("corpus/zlib-pack"), defaults());
    REQUIRE(zlib.findings.size() == 1);
    CHECK(zlib.findings[0].verdict == Verdict::Vulnerable);
    CHECK(zlib.findings[0].misuse == MisuseId::M3);
    CHECK(zlib.inventory.headers == std::vector<std::string>{"nan.h"});

    PackageReport brotli =
        analyze_package(fixture("corpus/brotli-pack"), defaults());
    REQUIRE(brotli.findings.size() == 1);
    CHECK(brotli.findings[0].verdict == Verdict::SanitizedHighLevel);

    PackageReport salt =
        analyze_package(fixture("corpus/salt-pack"), defaults());
    REQUIRE(salt.findings.size() == 1);
    CHECK(salt.findings[0].verdict == Verdict::SanitizedBoth);
    CHECK(salt.findings[0].sanitizers.size() >= 2);
}

TEST_CASE("the cross verdict is never stricter than the native one") {
    CppParseResult pad =
        parse_native_file(fixture("corpus/nativepad/pad.cc"));
    const NativeFunction* fn = find_fn(pad, "Pad");
    REQUIRE(fn != nullptr);
    Finding intra = analyze_intra(*fn, default_rules());
    CHECK(intra.verdict == Verdict::Vulnerable);
    CHECK(intra.misuse == MisuseId::M3);
    CHECK(intra.kind == "native");

    // the salt package checks natively and in the wrapper; intra sees one
    // side, cross sees both
    CppParseResult saltSrc =
        parse_native_file(fixture("corpus/salt-pack/salt.cc"));
    const NativeFunction* gen = find_fn(saltSrc, "GenSaltSync");
    REQUIRE(gen != nullptr);
    CHECK(analyze_intra(*gen, default_rules()).verdict ==
          Verdict::SanitizedNative);
}

TEST_CASE("bound but uncalled exports fall back to native analysis") {
    auto dir = fresh_temp_dir("direct_export");
    write_file(dir / "ext.cc", kSinkNative);
    write_file(dir / "index.js",
               "const ext = require('./build/ext.node');\n"
               "module.exports = function noop() { return 1; };\n");

    PackageReport report =
        analyze_package(dir.generic_string(), defaults());
    CHECK(report.inventory.directExport == true);
    CHECK(has_diagnostic(report,
                         "export 'read' is never called from script code"));
    REQUIRE(report.findings.size() == 1);
    CHECK(report.findings[0].kind == "native");
    CHECK(report.findings[0].verdict == Verdict::Vulnerable);
    CHECK(report.findings[0].exportedName == "read");
    CHECK(report.findings[0].nativeFunction == "Read");
    std::filesystem::remove_all(dir);
}

TEST_CASE("each paired export is judged separately") {
    auto dir = fresh_temp_dir("two_bindings");
    write_file(
        dir / "ext.cc",
        "#include <node_api.h>\n"
        "napi_value ReadInt(napi_env env, napi_callback_info info) {\n"
        "    size_t argc = 1;\n"
        "    napi_value args[1];\n"
        "    napi_get_cb_info(env, info, &argc, args, NULL, NULL);\n"
        "    int32_t v;\n"
        "    napi_get_value_int32(env, args[0], &v);\n"
        "    return NULL;\n"
        "}\n"
        "napi_value ReadStr(napi_env env, napi_callback_info info) {\n"
        "    size_t argc = 1, n;\n"
        "    napi_value args[1];\n"
        "    napi_get_cb_info(env, info, &argc, args, NULL, NULL);\n"
        "    napi_get_value_string_utf8(env, args[0], NULL, NULL, &n);\n"
        "    return NULL;\n"
        "}\n"
        "napi_value Init(napi_env env, napi_value exports) {\n"
        "    napi_property_descriptor props[] = {\n"
        "        {\"readInt\", NULL, ReadInt, NULL, NULL, NULL,\n"
        "         napi_default, NULL},\n"
        "        {\"readStr\", NULL, ReadStr, NULL, NULL, NULL,\n"
        "         napi_default, NULL},\n"
        "    };\n"
        "    napi_define_properties(env, exports, 2, props);\n"
        "    return exports;\n"
        "}\n");
    write_file(dir / "index.js",
               "const ext = require('./build/ext.node');\n"
               "module.exports.readInt = function readInt(a) {\n"
               "    return ext.readInt(a);\n"
               "};\n"
               "module.exports.readStr = function readStr(b) {\n"
               "    return ext.readStr(b);\n"
               "};\n");

    PackageReport report =
        analyze_package(dir.generic_string(), defaults());
    CHECK(report.inventory.bindingCount == 2);
    CHECK(report.inventory.directExport == false);
    REQUIRE(report.findings.size() == 2);
    CHECK(report.findings[0].kind == "cross");
    CHECK(report.findings[1].kind == "cross");
    CHECK(report.findings[0].exportedName == "readInt");
    CHECK(report.findings[1].exportedName == "readStr");
    std::filesystem::remove_all(dir);
}

TEST_CASE("linking reports unregistered and undefined targets") {
    auto dir = fresh_temp_dir("link_gaps");
    write_file(dir / "ext.cc",
               "#include <node_api.h>\n"
               "napi_value Go(napi_env env, napi_callback_info info);\n"
               "napi_value Init(napi_env env, napi_value exports) {\n"
               "    napi_property_descriptor desc = {\"go\", NULL, Go, NULL,\n"
               "                                     NULL, NULL,\n"
               "                                     napi_default, NULL};\n"
               "    napi_define_properties(env, exports, 1, &desc);\n"
               "    return exports;\n"
               "}\n");
    write_file(dir / "index.js",
               "const ext = require('./build/ext.node');\n"
               "module.exports = function run(v) {\n"
               "    ext.missing(v);\n"
               "    return ext.go(v);\n"
               "};\n");

    PackageReport report =
        analyze_package(dir.generic_string(), defaults());
    CHECK(has_diagnostic(report, "call to unregistered export 'missing'"));
    CHECK(has_diagnostic(report,
                         "native symbol 'Go' has no parsed definition"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("custom sink rules turn quiet packages into findings") {
    PackageReport quiet =
        analyze_package(fixture("custom/pkg"), defaults());
    CHECK(quiet.findings.empty());

    LoadedRules custom = load_rules(fixture("custom/custom.rules"));
    PackageReport loud = analyze_package(fixture("custom/pkg"), custom);
    REQUIRE(loud.findings.size() == 1);
    CHECK(loud.findings[0].verdict == Verdict::Vulnerable);
    CHECK(loud.findings[0].kind == "cross");
    CHECK(loud.findings[0].exportedName == "read");
}

TEST_CASE("package discovery finds the nearest source directories") {
    auto dirs = discover_packages({fixture("corpus")});
    REQUIRE(dirs.size() == 4);
    CHECK(ends_with(dirs[0], "corpus/brotli-pack"));
    CHECK(ends_with(dirs[1], "corpus/nativepad"));
    CHECK(ends_with(dirs[2], "corpus/salt-pack"));
    CHECK(ends_with(dirs[3], "corpus/zlib-pack"));

    CHECK_THROWS_WITH_AS(discover_packages({"/no/such/root"}),
                         doctest::Contains("no such directory"),
                         std::runtime_error);
    CHECK_THROWS_AS(analyze_package("/no/such/pkg", defaults()),
                    std::runtime_error);
}

TEST_CASE("an exhausted budget yields a partial, flagged report") {
    PackageReport report =
        analyze_package(fixture("corpus/nativepad"), defaults(), 0.0);
    CHECK(report.timedOut == true);
    CHECK(report.findings.empty());
    CHECK(report.id == "nativepad");
}
