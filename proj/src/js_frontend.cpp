#include "xbound/js_frontend.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "xbound/lex.hpp"

namespace xbound {

using lex::TokKind;
using lex::Token;

namespace {

const std::unordered_set<std::string>& js_keywords() {
    static const std::unordered_set<std::string> kw{
        "var", "let", "const", "function", "return", "if", "else", "for",
        "while", "do", "switch", "case", "default", "break", "continue",
        "new", "delete", "typeof", "instanceof", "in", "of", "this",
        "null", "undefined", "true", "false", "throw", "try", "catch",
        "finally", "async", "await", "yield", "class", "extends", "super",
        "export", "import", "void", "static", "get", "set"};
    return kw;
}

bool is_keyword(const Token& t) {
    return t.kind == TokKind::Ident && js_keywords().count(t.text) != 0;
}

bool is_punct(const Token& t, const char* text) {
    return t.kind == TokKind::Punct && t.text == text;
}

bool is_ident(const Token& t, const char* text) {
    return t.kind == TokKind::Ident && t.text == text;
}

bool is_placeholder(const std::string& s) {
    return s.rfind("__fnlit_", 0) == 0;
}

std::size_t match_forward(const std::vector<Token>& toks, std::size_t open,
                          std::size_t end, const char* openText,
                          const char* closeText) {
    int depth = 0;
    for (std::size_t i = open; i < end; ++i) {
        if (is_punct(toks[i], openText))
            ++depth;
        else if (is_punct(toks[i], closeText) && --depth == 0)
            return i;
    }
    return end;
}

std::size_t match_backward(const std::vector<Token>& toks, std::size_t close,
                           const char* openText, const char* closeText) {
    int depth = 0;
    for (std::size_t i = close + 1; i-- > 0;) {
        if (is_punct(toks[i], closeText))
            ++depth;
        else if (is_punct(toks[i], openText) && --depth == 0)
            return i;
        if (i == 0)
            break;
    }
    return close; // imbalance
}

std::vector<std::pair<std::size_t, std::size_t>>
split_top_commas(const std::vector<Token>& toks, std::size_t begin,
                 std::size_t end) {
    std::vector<std::pair<std::size_t, std::size_t>> groups;
    int depth = 0;
    std::size_t start = begin;
    for (std::size_t i = begin; i < end; ++i) {
        const Token& t = toks[i];
        if (is_punct(t, "(") || is_punct(t, "[") || is_punct(t, "{"))
            ++depth;
        else if (is_punct(t, ")") || is_punct(t, "]") || is_punct(t, "}"))
            --depth;
        else if (depth == 0 && is_punct(t, ",")) {
            groups.emplace_back(start, i);
            start = i + 1;
        }
    }
    if (start < end)
        groups.emplace_back(start, end);
    return groups;
}

SourceLoc loc_of(const Token& t, const std::string& file) {
    return SourceLoc{file, t.line, t.col};
}

// A function literal found anywhere in the file.
struct FnLit {
    std::size_t start = 0, end = 0;   // whole literal, end exclusive
    std::size_t paramB = 0, paramE = 0;
    std::size_t bodyB = 0, bodyE = 0;
    bool exprBody = false;
    bool declaration = false; // statement-position `function name(...)`
    std::string name;         // may be empty
    SourceLoc loc;
};

// assignment target just before `start`: name = <literal> or name: <literal>
std::string assigned_name(const std::vector<Token>& toks, std::size_t start) {
    if (start < 2)
        return {};
    if ((is_punct(toks[start - 1], "=") || is_punct(toks[start - 1], ":")) &&
        toks[start - 2].kind == TokKind::Ident && !is_keyword(toks[start - 2]))
        return toks[start - 2].text;
    return {};
}

std::vector<FnLit> find_function_literals(const std::vector<Token>& toks,
                                          std::size_t end,
                                          const std::string& file) {
    std::vector<FnLit> fns;
    for (std::size_t i = 0; i < end; ++i) {
        if (is_ident(toks[i], "function")) {
            FnLit fn;
            fn.start = i > 0 && is_ident(toks[i - 1], "async") ? i - 1 : i;
            std::size_t j = i + 1;
            if (j < end && toks[j].kind == TokKind::Ident) {
                fn.name = toks[j].text;
                ++j;
            }
            if (j >= end || !is_punct(toks[j], "("))
                continue;
            std::size_t pclose = match_forward(toks, j, end, "(", ")");
            if (pclose == end || pclose + 1 >= end ||
                !is_punct(toks[pclose + 1], "{"))
                continue;
            std::size_t bclose = match_forward(toks, pclose + 1, end, "{", "}");
            if (bclose == end)
                continue;
            fn.paramB = j + 1;
            fn.paramE = pclose;
            fn.bodyB = pclose + 2;
            fn.bodyE = bclose;
            fn.end = bclose + 1;
            fn.loc = loc_of(toks[fn.start], file);
            if (fn.name.empty())
                fn.name = assigned_name(toks, fn.start);
            else
                fn.declaration = true;
            fns.push_back(fn);
            continue;
        }
        if (!is_punct(toks[i], "=>") || i == 0)
            continue;
        FnLit fn;
        if (is_punct(toks[i - 1], ")")) {
            std::size_t popen = match_backward(toks, i - 1, "(", ")");
            if (popen == i - 1)
                continue;
            fn.start = popen;
            fn.paramB = popen + 1;
            fn.paramE = i - 1;
        } else if (toks[i - 1].kind == TokKind::Ident &&
                   !is_keyword(toks[i - 1])) {
            fn.start = i - 1;
            fn.paramB = i - 1;
            fn.paramE = i;
        } else {
            continue;
        }
        if (fn.start > 0 && is_ident(toks[fn.start - 1], "async"))
            --fn.start;
        if (i + 1 < end && is_punct(toks[i + 1], "{")) {
            std::size_t bclose = match_forward(toks, i + 1, end, "{", "}");
            if (bclose == end)
                continue;
            fn.bodyB = i + 2;
            fn.bodyE = bclose;
            fn.end = bclose + 1;
        } else {
            // expression body runs to the enclosing delimiter
            int depth = 0;
            std::size_t j = i + 1;
            for (; j < end; ++j) {
                const Token& t = toks[j];
                if (is_punct(t, "(") || is_punct(t, "[") || is_punct(t, "{"))
                    ++depth;
                else if (is_punct(t, ")") || is_punct(t, "]") ||
                         is_punct(t, "}")) {
                    if (depth == 0)
                        break;
                    --depth;
                } else if (depth == 0 &&
                           (is_punct(t, ",") || is_punct(t, ";"))) {
                    break;
                }
            }
            fn.bodyB = i + 1;
            fn.bodyE = j;
            fn.end = j;
            fn.exprBody = true;
        }
        fn.loc = loc_of(toks[fn.start], file);
        fn.name = assigned_name(toks, fn.start);
        fns.push_back(fn);
    }
    return fns;
}

struct RawCall {
    std::string callee; // normalized
    std::vector<std::pair<std::size_t, std::size_t>> argGroups;
    std::size_t loc; // token index of the chain start
};

struct StmtFacts {
    std::vector<std::string> defs;
    std::vector<std::string> uses;
    std::vector<std::string> callees;
    std::vector<RawCall> calls;
    std::vector<std::pair<std::string, std::string>> destructured;
    bool comparison = false;
};

void sort_unique(std::vector<std::string>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

void push_prefixes(std::vector<std::string>& out, const std::string& path,
                   bool includeFull) {
    std::size_t pos = 0;
    while (true) {
        std::size_t dot = path.find('.', pos);
        if (dot == std::string::npos)
            break;
        out.push_back(path.substr(0, dot));
        pos = dot + 1;
    }
    if (includeFull)
        out.push_back(path);
}

StmtFacts analyze_js_statement(const std::vector<Token>& toks,
                               std::size_t begin, std::size_t end) {
    StmtFacts f;

    // destructuring declaration: const {a, b: c} = chain
    std::size_t i = begin;
    if (i < end &&
        (is_ident(toks[i], "const") || is_ident(toks[i], "let") ||
         is_ident(toks[i], "var")) &&
        i + 1 < end && is_punct(toks[i + 1], "{")) {
        std::size_t close = match_forward(toks, i + 1, end, "{", "}");
        if (close != end && close + 1 < end &&
            is_punct(toks[close + 1], "=")) {
            std::vector<std::pair<std::string, std::string>> names;
            for (auto [b, e] : split_top_commas(toks, i + 2, close)) {
                std::string prop, local;
                for (std::size_t k = b; k < e; ++k) {
                    if (toks[k].kind != TokKind::Ident)
                        continue;
                    if (prop.empty())
                        prop = toks[k].text;
                    local = toks[k].text;
                }
                if (!prop.empty())
                    names.emplace_back(prop, local);
            }
            // right side must be a plain dotted chain
            std::string path;
            std::size_t k = close + 2;
            while (k < end) {
                if (toks[k].kind == TokKind::Ident && !is_keyword(toks[k])) {
                    if (!path.empty())
                        path += ".";
                    path += toks[k].text;
                    if (k + 1 < end && (is_punct(toks[k + 1], ".") ||
                                        is_punct(toks[k + 1], "?."))) {
                        k += 2;
                        continue;
                    }
                }
                break;
            }
            if (!path.empty() && !names.empty()) {
                for (auto& [prop, local] : names) {
                    f.defs.push_back(local);
                    f.destructured.emplace_back(local, path + "." + prop);
                }
                push_prefixes(f.uses, path, true);
                sort_unique(f.defs);
                sort_unique(f.uses);
                return f;
            }
        }
    }

    std::vector<char> consumed(end - begin, 0);
    auto used = [&](std::size_t k) -> char& { return consumed[k - begin]; };

    for (i = begin; i < end; ++i) {
        const Token& t = toks[i];
        if (t.kind == TokKind::Punct) {
            const std::string& p = t.text;
            if (p == "==" || p == "===" || p == "!=" || p == "!==" ||
                p == "<" || p == ">" || p == "<=" || p == ">=")
                f.comparison = true;
            continue;
        }
        if (t.kind != TokKind::Ident || used(i))
            continue;
        if (t.text == "typeof" || t.text == "instanceof") {
            f.callees.push_back(t.text);
            continue;
        }
        if (is_keyword(t))
            continue;
        if (is_placeholder(t.text))
            continue;

        // dotted chain
        std::string path = t.text;
        std::size_t last = i;
        while (last + 2 < end &&
               (is_punct(toks[last + 1], ".") ||
                is_punct(toks[last + 1], "?.")) &&
               toks[last + 2].kind == TokKind::Ident) {
            path += "." + toks[last + 2].text;
            last += 2;
        }
        for (std::size_t k = i; k <= last; ++k)
            used(k) = 1;
        const Token* next = last + 1 < end ? &toks[last + 1] : nullptr;

        if (next && is_punct(*next, "(")) {
            std::string norm = path;
            std::size_t pos;
            while ((pos = norm.find('.')) != std::string::npos)
                norm.replace(pos, 1, "::");
            f.callees.push_back(norm);
            push_prefixes(f.uses, path, false);
            std::size_t close =
                match_forward(toks, last + 1, end, "(", ")");
            RawCall call;
            call.callee = std::move(norm);
            call.argGroups = split_top_commas(toks, last + 2, close);
            call.loc = i;
            f.calls.push_back(std::move(call));
            i = last;
            continue;
        }
        if (next && is_punct(*next, "=")) {
            bool decl = i > begin &&
                        (is_ident(toks[i - 1], "const") ||
                         is_ident(toks[i - 1], "let") ||
                         is_ident(toks[i - 1], "var"));
            (void)decl;
            f.defs.push_back(path);
            push_prefixes(f.uses, path, false);
            i = last;
            continue;
        }
        if (next && next->kind == TokKind::Punct &&
            (next->text == "+=" || next->text == "-=" ||
             next->text == "*=" || next->text == "/=" ||
             next->text == "%=" || next->text == "++" ||
             next->text == "--")) {
            f.defs.push_back(path);
            push_prefixes(f.uses, path, true);
            i = last;
            continue;
        }
        push_prefixes(f.uses, path, true);
        i = last;
    }

    sort_unique(f.defs);
    sort_unique(f.uses);
    sort_unique(f.callees);
    return f;
}

bool is_control(const std::string& s) {
    return s == "if" || s == "while" || s == "for" || s == "switch" ||
           s == "catch";
}

} // namespace

JsParseResult parse_script(const std::string& source,
                           const std::string& path) {
    JsParseResult result;
    result.file = path;
    std::vector<Token> toks = lex::tokenize_js(source);
    std::size_t end = toks.size();
    while (end > 0 && toks[end - 1].kind == TokKind::End)
        --end;

    std::vector<FnLit> fns = find_function_literals(toks, end, path);

    // canonical names
    std::vector<std::string> canon(fns.size());
    for (std::size_t k = 0; k < fns.size(); ++k) {
        if (!fns[k].name.empty())
            canon[k] = fns[k].name;
        else
            canon[k] = "anon@" + std::to_string(fns[k].loc.line) + ":" +
                       std::to_string(fns[k].loc.column);
        result.literalNames["__fnlit_" + std::to_string(k)] = canon[k];
    }

    auto inside = [&](std::size_t k, std::size_t parentB,
                      std::size_t parentE) {
        return fns[k].start >= parentB && fns[k].end <= parentE;
    };
    auto direct_children = [&](std::size_t parentB, std::size_t parentE,
                               std::size_t self) {
        std::vector<std::size_t> kids;
        for (std::size_t k = 0; k < fns.size(); ++k) {
            if (k == self || !inside(k, parentB, parentE))
                continue;
            bool nested = false;
            for (std::size_t m = 0; m < fns.size(); ++m) {
                if (m == k || m == self || !inside(m, parentB, parentE))
                    continue;
                if (fns[k].start >= fns[m].bodyB &&
                    fns[k].end <= fns[m].bodyE) {
                    nested = true;
                    break;
                }
            }
            if (!nested)
                kids.push_back(k);
        }
        std::sort(kids.begin(), kids.end(), [&](std::size_t a, std::size_t b) {
            return fns[a].start < fns[b].start;
        });
        return kids;
    };

    // body tokens with directly nested function literals collapsed into
    // placeholder identifiers
    auto filtered_body = [&](std::size_t bodyB, std::size_t bodyE,
                             std::size_t self) {
        std::vector<Token> out;
        auto kids = direct_children(bodyB, bodyE, self);
        std::size_t ki = 0;
        std::size_t i = bodyB;
        while (i < bodyE) {
            if (ki < kids.size() && i == fns[kids[ki]].start) {
                const FnLit& kid = fns[kids[ki]];
                Token ph;
                ph.kind = TokKind::Ident;
                ph.text = "__fnlit_" + std::to_string(kids[ki]);
                ph.line = kid.loc.line;
                ph.col = kid.loc.column;
                out.push_back(ph);
                if (kid.declaration) {
                    Token semi;
                    semi.kind = TokKind::Punct;
                    semi.text = ";";
                    semi.line = kid.loc.line;
                    semi.col = kid.loc.column;
                    out.push_back(semi);
                }
                i = kid.end;
                ++ki;
                continue;
            }
            out.push_back(toks[i]);
            ++i;
        }
        return out;
    };

    auto build_function = [&](const std::string& name,
                              const std::vector<std::string>& params,
                              const SourceLoc& loc,
                              std::vector<Token> body, bool exprBody) {
        ScriptFunction fn;
        fn.name = name;
        fn.params = params;
        fn.loc = loc;

        std::size_t bend = body.size();
        auto emit = [&](std::size_t b, std::size_t e, bool asReturn) {
            if (b >= e)
                return;
            StmtFacts facts = analyze_js_statement(body, b, e);
            ScriptStatement st;
            st.loc = loc_of(body[b], path);
            st.text = lex::render(body, b, e);
            st.defs = std::move(facts.defs);
            st.uses = std::move(facts.uses);
            st.callees = std::move(facts.callees);
            st.comparison = facts.comparison;
            if (asReturn ||
                (body[b].kind == TokKind::Ident && body[b].text == "return"))
                st.kind = NodeKind::Return;
            else if (!st.callees.empty())
                st.kind = NodeKind::Call;
            else
                st.kind = NodeKind::Statement;
            fn.body.push_back(std::move(st));
            for (auto& [local, origin] : facts.destructured)
                fn.destructured[local] = origin;
            int stmtId = static_cast<int>(fn.body.size());
            for (const RawCall& call : facts.calls) {
                ScriptCallSite site;
                site.callee = call.callee;
                for (auto [ab, ae] : call.argGroups)
                    site.argTexts.push_back(lex::render(body, ab, ae));
                site.function = name;
                site.stmtIndex = stmtId;
                site.loc = loc_of(body[call.loc], path);
                result.callSites.push_back(std::move(site));
            }
        };

        if (exprBody) {
            emit(0, bend, true);
        } else {
            std::size_t i = 0;
            while (i < bend) {
                const Token& t = body[i];
                if (is_punct(t, "{") || is_punct(t, "}") ||
                    is_punct(t, ";")) {
                    ++i;
                    continue;
                }
                if (t.kind == TokKind::Ident &&
                    (t.text == "else" || t.text == "do" || t.text == "try" ||
                     t.text == "finally")) {
                    ++i;
                    continue;
                }
                if (t.kind == TokKind::Ident && is_control(t.text)) {
                    std::size_t open = i + 1;
                    if (open < bend && is_punct(body[open], "(")) {
                        std::size_t close =
                            match_forward(body, open, bend, "(", ")");
                        emit(i, std::min(close + 1, bend), false);
                        i = close + 1;
                    } else {
                        ++i;
                    }
                    continue;
                }
                std::size_t j = i;
                int depth = 0;
                while (j < bend) {
                    if (is_punct(body[j], "(") || is_punct(body[j], "[") ||
                        is_punct(body[j], "{"))
                        ++depth;
                    else if (is_punct(body[j], ")") ||
                             is_punct(body[j], "]") ||
                             is_punct(body[j], "}"))
                        --depth;
                    else if (depth == 0 && is_punct(body[j], ";"))
                        break;
                    ++j;
                }
                emit(i, j, false);
                i = j + 1;
            }
        }
        result.functions.push_back(std::move(fn));
    };

    // the synthetic top level first
    build_function("<toplevel>", {}, SourceLoc{path, 1, 0},
                   filtered_body(0, end, fns.size()), false);

    for (std::size_t k = 0; k < fns.size(); ++k) {
        const FnLit& fn = fns[k];
        std::vector<std::string> params;
        for (auto [b, e] : split_top_commas(toks, fn.paramB, fn.paramE)) {
            for (std::size_t p = b; p < e; ++p) {
                if (toks[p].kind == TokKind::Ident && !is_keyword(toks[p])) {
                    params.push_back(toks[p].text);
                    break;
                }
            }
        }
        build_function(canon[k], params, fn.loc,
                       filtered_body(fn.bodyB, fn.bodyE, k), fn.exprBody);
    }
    return result;
}

JsParseResult parse_script_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_script(buf.str(), path);
}

namespace {

bool entity_touches(const std::vector<std::string>& entities,
                    const std::string& name) {
    for (const std::string& e : entities) {
        if (e == name)
            return true;
        if (e.size() > name.size() && e.compare(0, name.size(), name) == 0 &&
            e[name.size()] == '.')
            return true;
    }
    return false;
}

} // namespace

std::vector<std::string> expression_entities(const std::string& text) {
    std::vector<Token> toks = lex::tokenize_js(text);
    std::size_t end = toks.size();
    while (end > 0 && toks[end - 1].kind == TokKind::End)
        --end;
    StmtFacts f = analyze_js_statement(toks, 0, end);
    return f.uses;
}

FunctionGraph build_script_dfg(const ScriptFunction& fn) {
    FunctionGraph g(fn.name);
    GraphNode root;
    root.id = 0;
    root.language = Language::HighLevel;
    root.kind = NodeKind::FunctionDef;
    root.label = fn.name;
    root.loc = fn.loc;
    root.roles = RoleRoot;
    g.add_node(std::move(root));
    g.set_root(0);

    int id = 1;
    for (const ScriptStatement& st : fn.body) {
        GraphNode n;
        n.id = id++;
        n.language = Language::HighLevel;
        n.kind = st.kind;
        n.label = st.text;
        n.loc = st.loc;
        g.add_node(std::move(n));
    }

    std::set<std::tuple<int, int, std::string>> seen;
    auto link = [&](int from, int to, const std::string& var) {
        if (from == to || !seen.emplace(from, to, var).second)
            return;
        g.add_edge(FlowEdge{from, to, var, EdgeKind::DefUse});
    };

    for (std::size_t s = 0; s < fn.body.size(); ++s) {
        const ScriptStatement& st = fn.body[s];
        int sid = static_cast<int>(s) + 1;
        for (const std::string& p : fn.params) {
            if (entity_touches(st.uses, p) || entity_touches(st.defs, p))
                link(0, sid, p);
        }
    }
    for (std::size_t a = 0; a < fn.body.size(); ++a) {
        for (std::size_t b = 0; b < fn.body.size(); ++b) {
            if (a == b)
                continue;
            for (const std::string& d : fn.body[a].defs) {
                if (entity_touches(fn.body[b].uses, d))
                    link(static_cast<int>(a) + 1, static_cast<int>(b) + 1, d);
            }
        }
    }
    return g;
}

void tag_script_roles(FunctionGraph& graph, const RuleSet& rules) {
    for (GraphNode& n : graph.mutable_nodes()) {
        if (n.kind == NodeKind::FunctionDef)
            continue;
        std::vector<Token> toks = lex::tokenize_js(n.label);
        std::size_t end = toks.size();
        while (end > 0 && toks[end - 1].kind == TokKind::End)
            --end;
        StmtFacts f = analyze_js_statement(toks, 0, end);
        for (const std::string& c : f.callees) {
            for (const CallPattern& p : rules.scriptSanitizers)
                if (p.matches(c))
                    n.roles |= RoleSanitizer;
        }
        if (f.comparison &&
            std::find(f.uses.begin(), f.uses.end(), "arguments.length") !=
                f.uses.end())
            n.roles |= RoleSanitizer;
    }
}

std::vector<NativeCallRef> find_native_call_sites(
    const JsParseResult& parsed, std::vector<std::string>* diagnostics) {
    std::unordered_set<std::string> handles;
    for (const ScriptCallSite& site : parsed.callSites) {
        if (site.callee != "require")
            continue;
        if (site.argTexts.empty())
            continue;
        const std::string& arg = site.argTexts[0];
        bool literal = !arg.empty() && (arg[0] == '"' || arg[0] == '\'');
        if (!literal) {
            if (diagnostics)
                diagnostics->push_back(site.loc.str() +
                                       ": dynamic require argument, binding "
                                       "target unresolved");
            continue;
        }
        std::string value = arg.substr(1, arg.size() - 2);
        bool native = value == "bindings" ||
                      (value.size() > 5 &&
                       value.compare(value.size() - 5, 5, ".node") == 0);
        if (!native)
            continue;
        // the handle is whatever the enclosing statement assigns
        for (const ScriptFunction& fn : parsed.functions) {
            if (fn.name != site.function)
                continue;
            if (site.stmtIndex < 1 ||
                site.stmtIndex > static_cast<int>(fn.body.size()))
                continue;
            const ScriptStatement& st = fn.body[site.stmtIndex - 1];
            if (!st.defs.empty())
                handles.insert(st.defs.front());
        }
    }

    std::vector<NativeCallRef> out;
    for (const ScriptCallSite& site : parsed.callSites) {
        std::size_t sep = site.callee.find("::");
        if (sep == std::string::npos)
            continue;
        std::string head = site.callee.substr(0, sep);
        std::string rest = site.callee.substr(sep + 2);
        if (!handles.count(head) || rest.find("::") != std::string::npos)
            continue;
        NativeCallRef ref;
        ref.handle = head;
        ref.exportedName = rest;
        ref.function = site.function;
        ref.stmtIndex = site.stmtIndex;
        ref.loc = site.loc;
        out.push_back(std::move(ref));
    }
    return out;
}

const ScriptFunction* CallGraph::find(const std::string& canonical) const {
    for (const ScriptFunction* fn : functions)
        if (fn->name == canonical)
            return fn;
    return nullptr;
}

CallGraph build_call_graph(const std::vector<JsParseResult>& files) {
    CallGraph cg;
    std::unordered_set<std::string> known;
    for (const JsParseResult& file : files) {
        for (const ScriptFunction& fn : file.functions) {
            cg.functions.push_back(&fn);
            if (fn.name != "<toplevel>")
                known.insert(fn.name);
        }
    }

    static const std::unordered_set<std::string> routeMethods{
        "get", "post", "put", "delete", "all", "use", "on"};

    for (const JsParseResult& file : files) {
        for (const ScriptCallSite& site : file.callSites) {
            if (site.callee == "require")
                continue;
            CallEdge edge;
            edge.caller = site.function;
            edge.callee = site.callee;
            edge.argTexts = site.argTexts;
            edge.loc = site.loc;
            if (site.callee.find("::") == std::string::npos &&
                known.count(site.callee))
                edge.resolved = site.callee;
            cg.edges.push_back(edge);

            // handlers passed to route registrations become callees too
            std::string tail = site.callee;
            std::size_t sep = tail.rfind("::");
            if (sep != std::string::npos)
                tail = tail.substr(sep + 2);
            if (!routeMethods.count(tail))
                continue;
            for (const std::string& arg : site.argTexts) {
                std::string target;
                if (is_placeholder(arg)) {
                    auto it = file.literalNames.find(arg);
                    if (it != file.literalNames.end())
                        target = it->second;
                } else if (known.count(arg)) {
                    target = arg;
                }
                if (target.empty())
                    continue;
                CallEdge h;
                h.caller = site.function;
                h.callee = tail;
                h.resolved = target;
                h.loc = site.loc;
                h.routeHandler = true;
                cg.edges.push_back(std::move(h));
            }
        }
    }
    return cg;
}

} // namespace xbound
