#ifndef XBOUND_RULES_HPP
#define XBOUND_RULES_HPP

#include <regex>
#include <stdexcept>
#include <string>
#include <vector>

namespace xbound {

enum class MisuseId { M3, M4 };

const char* misuse_name(MisuseId m);

// A sink or sanitizer call-name pattern. Pattern syntax:
//   *.Name        member/qualified call with any receiver (also *::Name)
//   A::B          qualified name, matched as a segment suffix
//   Name          plain call name, exact match
//   #type#        expands over the configured type list; also accepts a
//                 trailing _suffix so napi_get_value_#type# covers
//                 napi_get_value_string_utf8
//   Name<#type#>  template-call syntax, qualifiers inside <> ignored
// A trailing () marks the pattern as a call name and is stripped.
struct CallPattern {
    std::string text;
    MisuseId misuse = MisuseId::M3;

    bool anyReceiver = false;   // pattern had a *. or *:: prefix
    std::regex nameRegex;       // applied to the callee's segment suffix
    std::size_t segmentCount = 0;

    // `callee` is a separator-normalized call name, e.g. "napi_typeof",
    // "node::Buffer::Data", "info[0]::ToObject", "Buffer::isBuffer".
    bool matches(const std::string& callee) const;
};

CallPattern compile_pattern(const std::string& text,
                            const std::vector<std::string>& types,
                            MisuseId misuse = MisuseId::M3);

// Replaces '.', '->' separators with "::" so patterns match member and
// qualified call spellings alike.
std::string normalize_callee(const std::string& raw);

// One tracked-API rule for the application analysis, e.g.
// run(_, tracked) with sources {req, req.body}.
struct AppRuleSpec {
    std::string apiName;
    std::vector<bool> tracked;   // one entry per declared position
    std::vector<std::string> sources;

    std::size_t tracked_index() const;
    std::size_t arity() const { return tracked.size(); }
};

// Entity vs source-pattern match. A plain pattern matches the entity and
// any dotted path under it; a trailing ".*" wildcard matches strictly
// below the prefix.
bool source_matches(const std::string& pattern, const std::string& entity);

struct RuleSet {
    std::vector<CallPattern> nativeSinks;
    std::vector<CallPattern> nativeSanitizers;
    std::vector<CallPattern> scriptSanitizers;
    std::vector<std::string> types;

    bool script_instanceof_enabled() const;
};

struct LoadedRules {
    RuleSet rules;
    std::vector<AppRuleSpec> appRules;
};

class RuleParseError : public std::runtime_error {
public:
    RuleParseError(int line, const std::string& what)
        : std::runtime_error("rules:" + std::to_string(line) + ": " + what),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

// Embedded defaults: the stock sink/sanitizer lists plus the seven
// builtin app rules.
const RuleSet& default_rules();
std::vector<AppRuleSpec> builtin_app_rules();
std::string default_rules_text();

// Line-oriented grammar:
//   # comment
//   types Boolean,Number,...
//   sink native <M3|M4> "<pattern>"
//   sanitizer native "<pattern>"
//   sanitizer script "<pattern>"
//   approle "<api>(<_|tracked>,...)" sources <comma-separated>
// Unknown directives and empty sink lists are errors.
LoadedRules parse_rules(const std::string& text);
LoadedRules load_rules(const std::string& path);

} // namespace xbound

#endif
