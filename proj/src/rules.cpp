#include "xbound/rules.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace xbound {

const char* misuse_name(MisuseId m) {
    return m == MisuseId::M3 ? "M3" : "M4";
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::stringstream ss(s);
    while (std::getline(ss, cur, ','))
        if (!trim(cur).empty())
            out.push_back(trim(cur));
    return out;
}

// Split a call name on "::" separators, ignoring those inside <>.
std::vector<std::string> split_segments(const std::string& name) {
    std::vector<std::string> segs;
    std::string cur;
    int depth = 0;
    for (std::size_t i = 0; i < name.size(); ++i) {
        char c = name[i];
        if (c == '<')
            ++depth;
        else if (c == '>')
            --depth;
        if (depth == 0 && c == ':' && i + 1 < name.size() &&
            name[i + 1] == ':') {
            segs.push_back(cur);
            cur.clear();
            ++i;
            continue;
        }
        cur.push_back(c);
    }
    segs.push_back(cur);
    return segs;
}

std::string regex_escape(char c) {
    static const std::string special = R"(\^$.|?*+()[]{})";
    if (special.find(c) != std::string::npos)
        return std::string("\\") + c;
    return std::string(1, c);
}

std::string type_alternation(const std::vector<std::string>& types) {
    std::string alt = "(?:";
    for (std::size_t i = 0; i < types.size(); ++i) {
        if (i)
            alt += "|";
        alt += types[i];
    }
    alt += ")";
    return alt;
}

} // namespace

std::string normalize_callee(const std::string& raw) {
    std::string out;
    int depth = 0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        char c = raw[i];
        if (c == '<')
            ++depth;
        else if (c == '>')
            --depth;
        if (depth == 0 && c == '-' && i + 1 < raw.size() && raw[i + 1] == '>') {
            out += "::";
            ++i;
            continue;
        }
        if (depth == 0 && c == '.') {
            out += "::";
            continue;
        }
        out.push_back(c);
    }
    return out;
}

CallPattern compile_pattern(const std::string& text,
                            const std::vector<std::string>& types,
                            MisuseId misuse) {
    CallPattern p;
    p.text = text;
    p.misuse = misuse;

    std::string body = text;
    if (body.size() >= 2 && body.compare(body.size() - 2, 2, "()") == 0)
        body = body.substr(0, body.size() - 2);
    if (body.rfind("*.", 0) == 0) {
        p.anyReceiver = true;
        body = body.substr(2);
    } else if (body.rfind("*::", 0) == 0) {
        p.anyReceiver = true;
        body = body.substr(3);
    }
    if (body.empty())
        throw std::invalid_argument("empty pattern: " + text);
    if (body.find("#type#") != std::string::npos &&
        body.find("#type#") != body.rfind("#type#"))
        throw std::invalid_argument("#type# may appear at most once: " + text);
    if (body.find("#type#") != std::string::npos && types.empty())
        throw std::invalid_argument("pattern uses #type# but no types set");

    auto segments = split_segments(normalize_callee(body));
    p.segmentCount = segments.size();

    std::string rx;
    for (std::size_t s = 0; s < segments.size(); ++s) {
        if (s)
            rx += "::";
        const std::string& seg = segments[s];
        for (std::size_t i = 0; i < seg.size();) {
            if (seg.compare(i, 8, "<#type#>") == 0) {
                // Template argument; qualifiers inside <> are ignored.
                rx += "<(?:[A-Za-z_][A-Za-z0-9_]*::)*" +
                      type_alternation(types) + ">";
                i += 8;
            } else if (seg.compare(i, 6, "#type#") == 0) {
                // Accept a _suffix so e.g. napi_get_value_#type# covers
                // napi_get_value_string_utf8.
                rx += type_alternation(types) + "(?:_[A-Za-z0-9_]+)?";
                i += 6;
            } else {
                rx += regex_escape(seg[i]);
                ++i;
            }
        }
    }
    p.nameRegex = std::regex(rx, std::regex::icase);
    return p;
}

bool CallPattern::matches(const std::string& callee) const {
    auto segs = split_segments(callee);
    if (segs.size() < segmentCount)
        return false;
    if (anyReceiver && segs.size() < segmentCount + 1)
        return false;
    if (!anyReceiver && segmentCount == 1 && segs.size() != 1)
        return false;
    std::string suffix;
    for (std::size_t i = segs.size() - segmentCount; i < segs.size(); ++i) {
        if (!suffix.empty())
            suffix += "::";
        suffix += segs[i];
    }
    return std::regex_match(suffix, nameRegex);
}

std::size_t AppRuleSpec::tracked_index() const {
    for (std::size_t i = 0; i < tracked.size(); ++i)
        if (tracked[i])
            return i;
    throw std::logic_error("rule has no tracked position");
}

bool source_matches(const std::string& pattern, const std::string& entity) {
    if (pattern.size() > 2 &&
        pattern.compare(pattern.size() - 2, 2, ".*") == 0) {
        std::string prefix = pattern.substr(0, pattern.size() - 2);
        return entity.size() > prefix.size() + 1 &&
               entity.compare(0, prefix.size(), prefix) == 0 &&
               entity[prefix.size()] == '.';
    }
    if (entity == pattern)
        return true;
    return entity.size() > pattern.size() &&
           entity.compare(0, pattern.size(), pattern) == 0 &&
           entity[pattern.size()] == '.';
}

bool RuleSet::script_instanceof_enabled() const {
    return std::any_of(scriptSanitizers.begin(), scriptSanitizers.end(),
                       [](const CallPattern& p) {
                           return p.text == "instanceof";
                       });
}

std::string default_rules_text() {
    return R"rules(# default misuse rules
types Boolean,Number,Int32,Uint32,Int64,Double,String,Object,Function,Array,Buffer,External,Date,BigInt
sink native M3 "napi_get_buffer_info()"
sink native M3 "Buffer::Data()"
sink native M3 "Buffer::Length()"
sink native M3 "*.As<#type#>"
sink native M3 "*.To<#type#>"
sink native M3 "*.To#type#()"
sink native M3 "*.ToLocalChecked()"
sink native M3 "*::Cast()"
sink native M3 "napi_get_value_#type#()"
sanitizer native "napi_is_#type#()"
sanitizer native "napi_typeof()"
sanitizer native "Nan::Check()"
sanitizer native "*.HasInstance()"
sanitizer native "*.Is#type#()"
sanitizer script "typeof"
sanitizer script "Buffer.isBuffer()"
approle "run(_,tracked)" sources req,req.body,req.params,req.query
approle "parseXml(tracked)" sources req,req.body,req.params,req.query
approle "powm(_,tracked)" sources req,req.body,req.params,req.query
approle "setTimezone(tracked)" sources req,req.body,req.params,req.query
approle "query(_,tracked,_)" sources req,req.body,req.params,req.query
approle "encode(tracked)" sources req,req.body,req.params,req.query
approle "toBigIntLE(tracked)" sources req,req.body,req.params,req.query
)rules";
}

namespace {

// Extracts the next double-quoted string from `rest`, advancing it.
std::string take_quoted(std::string& rest, int lineNo) {
    std::size_t b = rest.find('"');
    if (b == std::string::npos)
        throw RuleParseError(lineNo, "expected quoted pattern");
    std::size_t e = rest.find('"', b + 1);
    if (e == std::string::npos)
        throw RuleParseError(lineNo, "unterminated quote");
    std::string out = rest.substr(b + 1, e - b - 1);
    rest = rest.substr(e + 1);
    return out;
}

AppRuleSpec parse_approle(const std::string& spec, const std::string& sources,
                          int lineNo) {
    AppRuleSpec rule;
    std::size_t lp = spec.find('(');
    std::size_t rp = spec.rfind(')');
    if (lp == std::string::npos || rp == std::string::npos || rp < lp)
        throw RuleParseError(lineNo, "approle spec must look like api(_,tracked)");
    rule.apiName = trim(spec.substr(0, lp));
    if (rule.apiName.empty())
        throw RuleParseError(lineNo, "approle missing api name");
    int trackedCount = 0;
    for (const auto& pos : split_csv(spec.substr(lp + 1, rp - lp - 1))) {
        if (pos == "tracked") {
            rule.tracked.push_back(true);
            ++trackedCount;
        } else if (pos == "_") {
            rule.tracked.push_back(false);
        } else {
            throw RuleParseError(lineNo, "position must be _ or tracked: " + pos);
        }
    }
    if (trackedCount != 1)
        throw RuleParseError(lineNo, "approle needs exactly one tracked position");
    rule.sources = split_csv(sources);
    if (rule.sources.empty())
        throw RuleParseError(lineNo, "approle needs a non-empty source set");
    return rule;
}

} // namespace

LoadedRules parse_rules(const std::string& text) {
    LoadedRules out;
    struct Pending {
        std::string kind; // "sink-native", "san-native", "san-script"
        std::string pattern;
        MisuseId misuse;
        int line;
    };
    std::vector<Pending> pending;

    std::istringstream in(text);
    std::string line;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        std::size_t hash = line.find('#');
        // keep #type# intact; only strip comments starting a token
        if (hash != std::string::npos &&
            (hash == 0 || line[hash - 1] == ' ' || line[hash - 1] == '\t') &&
            line.compare(hash, 6, "#type#") != 0)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        std::istringstream ls(line);
        std::string directive;
        ls >> directive;
        std::string rest;
        std::getline(ls, rest);
        if (directive == "types") {
            out.rules.types = split_csv(rest);
            if (out.rules.types.empty())
                throw RuleParseError(lineNo, "types list is empty");
        } else if (directive == "sink") {
            std::istringstream rs(rest);
            std::string lang, misuse;
            rs >> lang >> misuse;
            if (lang != "native")
                throw RuleParseError(lineNo, "only native sinks are supported");
            if (misuse != "M3" && misuse != "M4")
                throw RuleParseError(lineNo, "sink misuse must be M3 or M4");
            std::string tail;
            std::getline(rs, tail);
            pending.push_back({"sink-native", take_quoted(tail, lineNo),
                               misuse == "M3" ? MisuseId::M3 : MisuseId::M4,
                               lineNo});
        } else if (directive == "sanitizer") {
            std::istringstream rs(rest);
            std::string lang;
            rs >> lang;
            if (lang != "native" && lang != "script")
                throw RuleParseError(lineNo, "sanitizer language must be native or script");
            std::string tail;
            std::getline(rs, tail);
            pending.push_back({lang == "native" ? "san-native" : "san-script",
                               take_quoted(tail, lineNo), MisuseId::M3,
                               lineNo});
        } else if (directive == "approle") {
            std::string spec = take_quoted(rest, lineNo);
            std::istringstream rs(rest);
            std::string kw;
            rs >> kw;
            if (kw != "sources")
                throw RuleParseError(lineNo, "approle expects a sources clause");
            std::string srcs;
            std::getline(rs, srcs);
            out.appRules.push_back(parse_approle(spec, srcs, lineNo));
        } else {
            throw RuleParseError(lineNo, "unknown directive: " + directive);
        }
    }

    // Patterns compile after the whole file so a later types line still
    // applies.
    for (const auto& p : pending) {
        try {
            CallPattern cp = compile_pattern(p.pattern, out.rules.types, p.misuse);
            if (p.kind == "sink-native")
                out.rules.nativeSinks.push_back(std::move(cp));
            else if (p.kind == "san-native")
                out.rules.nativeSanitizers.push_back(std::move(cp));
            else
                out.rules.scriptSanitizers.push_back(std::move(cp));
        } catch (const std::invalid_argument& e) {
            throw RuleParseError(p.line, e.what());
        }
    }
    if (out.rules.nativeSinks.empty())
        throw RuleParseError(lineNo, "at least one native sink is required");
    return out;
}

LoadedRules load_rules(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot read rules file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_rules(buf.str());
}

const RuleSet& default_rules() {
    static const RuleSet rules = parse_rules(default_rules_text()).rules;
    return rules;
}

std::vector<AppRuleSpec> builtin_app_rules() {
    static const std::vector<AppRuleSpec> rules =
        parse_rules(default_rules_text()).appRules;
    return rules;
}

} // namespace xbound
