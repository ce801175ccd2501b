#include "xbound/cpp_frontend.hpp"

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

const char* api_style_name(ApiStyle s) {
    switch (s) {
    case ApiStyle::NApi: return "napi";
    case ApiStyle::Nan: return "nan";
    case ApiStyle::Ruby: return "ruby";
    case ApiStyle::Python: return "python";
    }
    return "?";
}

namespace {

const std::unordered_set<std::string>& keywords() {
    static const std::unordered_set<std::string> kw{
        "if", "else", "for", "while", "do", "switch", "case", "default",
        "break", "continue", "return", "goto", "new", "delete", "sizeof",
        "const", "static", "inline", "extern", "void", "struct", "class",
        "enum", "union", "typedef", "using", "namespace", "template",
        "typename", "true", "false", "NULL", "nullptr", "this", "int",
        "char", "long", "short", "unsigned", "signed", "float", "double",
        "bool", "auto", "throw", "try", "catch", "operator"};
    return kw;
}

bool is_keyword(const Token& t) {
    return t.kind == TokKind::Ident && keywords().count(t.text) != 0;
}

bool is_punct(const Token& t, const char* text) {
    return t.kind == TokKind::Punct && t.text == text;
}

// Index of the matching closer for toks[open], or end on imbalance.
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

std::string strip_quotes(const std::string& s) {
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\''))
        return s.substr(1, s.size() - 2);
    return s;
}

// A call-name chain ending right before an opening parenthesis, e.g.
// info[0]->ToObject( or Nan::New<v8::String>(.
struct CalleeChain {
    std::string normalized;              // segments joined with ::
    std::vector<std::string> segments;   // outermost receiver first
    std::size_t begin = 0;               // first chain token
    std::size_t nameTok = 0;             // final segment's identifier token
};

// Walks backwards from toks[openParen - 1]. Returns false when the tokens
// before the parenthesis are not a call name.
bool callee_before(const std::vector<Token>& toks, std::size_t openParen,
                   std::size_t sliceBegin, CalleeChain& out) {
    std::vector<std::string> rev;
    std::size_t j = openParen; // exclusive upper bound of current segment
    std::size_t nameTok = 0;
    bool first = true;
    while (true) {
        if (j == sliceBegin)
            return false;
        std::size_t k = j - 1;
        std::string segment;
        std::size_t segBegin;
        if (toks[k].kind == TokKind::Ident && !is_keyword(toks[k])) {
            segment = toks[k].text;
            segBegin = k;
            if (first)
                nameTok = k;
        } else if (is_punct(toks[k], ">")) {
            // template arguments belong to the identifier before them
            int depth = 0;
            std::size_t m = k + 1;
            while (m-- > sliceBegin) {
                if (is_punct(toks[m], ">"))
                    ++depth;
                else if (is_punct(toks[m], "<") && --depth == 0)
                    break;
                if (m == sliceBegin)
                    return false;
            }
            if (m == sliceBegin || toks[m - 1].kind != TokKind::Ident ||
                is_keyword(toks[m - 1]))
                return false;
            segment = lex::render(toks, m - 1, k + 1);
            segBegin = m - 1;
            if (first)
                nameTok = m - 1;
        } else if (is_punct(toks[k], "]")) {
            int depth = 0;
            std::size_t m = k + 1;
            while (m-- > sliceBegin) {
                if (is_punct(toks[m], "]"))
                    ++depth;
                else if (is_punct(toks[m], "[") && --depth == 0)
                    break;
                if (m == sliceBegin)
                    return false;
            }
            if (m == sliceBegin || toks[m - 1].kind != TokKind::Ident ||
                is_keyword(toks[m - 1]))
                return false;
            segment = lex::render(toks, m - 1, k + 1);
            segBegin = m - 1;
            if (first)
                return false; // foo[i]( is an element call, not a name
        } else {
            return false;
        }
        first = false;
        rev.push_back(segment);
        if (segBegin > sliceBegin &&
            (is_punct(toks[segBegin - 1], "::") ||
             is_punct(toks[segBegin - 1], ".") ||
             is_punct(toks[segBegin - 1], "->"))) {
            j = segBegin - 1;
            continue;
        }
        out.begin = segBegin;
        break;
    }
    std::reverse(rev.begin(), rev.end());
    out.segments = std::move(rev);
    out.nameTok = nameTok;
    std::string joined;
    for (const auto& s : out.segments) {
        if (!joined.empty())
            joined += "::";
        joined += s;
    }
    out.normalized = std::move(joined);
    return !out.normalized.empty();
}

// Per-statement def/use/callee approximation. See the header for the
// statement model; this is deliberately flow-insensitive.
struct StmtFacts {
    std::vector<std::string> defs;
    std::vector<std::string> uses;
    std::vector<std::string> callees;
    bool comparison = false;
};

void sort_unique(std::vector<std::string>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

StmtFacts analyze_statement(const std::vector<Token>& toks,
                            std::size_t begin, std::size_t end) {
    StmtFacts f;
    std::vector<char> consumed(end - begin, 0);
    auto used = [&](std::size_t i) -> char& { return consumed[i - begin]; };

    // mark < > pairs that are template arguments (followed by a call or a
    // declarator) so they do not count as comparisons
    std::vector<char> templatePunct(end - begin, 0);
    for (std::size_t i = begin; i < end; ++i) {
        if (!is_punct(toks[i], "<"))
            continue;
        int depth = 1;
        std::size_t k = i + 1;
        while (k < end) {
            const Token& u = toks[k];
            if (is_punct(u, "<"))
                ++depth;
            else if (is_punct(u, ">")) {
                if (--depth == 0)
                    break;
            } else if (!(u.kind == TokKind::Ident || is_punct(u, "::") ||
                         is_punct(u, ",") || is_punct(u, "*") ||
                         is_punct(u, "&"))) {
                break;
            }
            ++k;
        }
        if (k < end && depth == 0 &&
            (k + 1 >= end || is_punct(toks[k + 1], "(") ||
             toks[k + 1].kind == TokKind::Ident)) {
            templatePunct[i - begin] = 1;
            templatePunct[k - begin] = 1;
        }
    }

    // call names first, so the final segment never counts as a variable
    for (std::size_t i = begin; i < end; ++i) {
        if (!is_punct(toks[i], "("))
            continue;
        CalleeChain chain;
        if (!callee_before(toks, i, begin, chain))
            continue;
        f.callees.push_back(chain.normalized);
        used(chain.nameTok) = 1;
        // every receiver segment is a read; indexed ones also read the base
        for (std::size_t s = 0; s + 1 < chain.segments.size(); ++s) {
            const std::string& seg = chain.segments[s];
            f.uses.push_back(seg);
            std::size_t br = seg.find('[');
            if (br != std::string::npos)
                f.uses.push_back(seg.substr(0, br));
        }
    }

    bool isReturn = begin < end && toks[begin].kind == TokKind::Ident &&
                    toks[begin].text == "return";

    for (std::size_t i = begin; i < end; ++i) {
        const Token& t = toks[i];
        if (t.kind == TokKind::Punct) {
            const std::string& p = t.text;
            if (p == "==" || p == "!=" || p == "<=" || p == ">=" ||
                p == "===" || p == "!==") {
                f.comparison = true;
            } else if ((p == "<" || p == ">") && !templatePunct[i - begin]) {
                f.comparison = true;
            }
            continue;
        }
        if (t.kind != TokKind::Ident || is_keyword(t) || used(i))
            continue;

        const Token* prev = i > begin ? &toks[i - 1] : nullptr;
        const Token* next = i + 1 < end ? &toks[i + 1] : nullptr;

        // declaration: Type name, Type* name, Local<...> name
        bool declPrev =
            !isReturn && prev &&
            ((prev->kind == TokKind::Ident && !is_keyword(*prev) &&
              !used(i - 1)) ||
             is_punct(*prev, ">") || is_punct(*prev, "*") ||
             is_punct(*prev, "&"));
        if (is_punct(*(prev ? prev : &t), "*") || is_punct(*(prev ? prev : &t), "&")) {
            // pointer declarator only when the token before * / & is a type
            if (i < begin + 2 ||
                !(toks[i - 2].kind == TokKind::Ident || is_punct(toks[i - 2], ">")))
                declPrev = false;
        }
        bool declNext = !next || is_punct(*next, "=") ||
                        is_punct(*next, ",") || is_punct(*next, "[") ||
                        is_punct(*next, "(");
        if (declPrev && declNext) {
            f.defs.push_back(t.text);
            used(i) = 1;
            // comma-continued declarators: size_t a = 1, b;
            std::size_t k = i + 1;
            int depth = 0;
            while (k < end) {
                if (is_punct(toks[k], "(") || is_punct(toks[k], "[") ||
                    is_punct(toks[k], "{"))
                    ++depth;
                else if (is_punct(toks[k], ")") || is_punct(toks[k], "]") ||
                         is_punct(toks[k], "}"))
                    --depth;
                else if (depth == 0 && is_punct(toks[k], ",")) {
                    std::size_t n = k + 1;
                    while (n < end && (is_punct(toks[n], "*") ||
                                       is_punct(toks[n], "&")))
                        ++n;
                    if (n < end && toks[n].kind == TokKind::Ident &&
                        !is_keyword(toks[n]) && !used(n)) {
                        bool nameLike =
                            n + 1 >= end || is_punct(toks[n + 1], "=") ||
                            is_punct(toks[n + 1], ",") ||
                            is_punct(toks[n + 1], "[");
                        if (nameLike) {
                            f.defs.push_back(toks[n].text);
                            used(n) = 1;
                        }
                    }
                }
                ++k;
            }
            continue;
        }

        if (next && next->kind == TokKind::Punct) {
            const std::string& np = next->text;
            if (np == "=") {
                f.defs.push_back(t.text);
                used(i) = 1;
                continue;
            }
            if (np == "+=" || np == "-=" || np == "*=" || np == "/=" ||
                np == "%=" || np == "&=" || np == "|=" || np == "^=" ||
                np == "<<=" || np == ">>=" || np == "++" || np == "--") {
                f.defs.push_back(t.text);
                f.uses.push_back(t.text);
                used(i) = 1;
                continue;
            }
            if (np == "[") {
                std::size_t close = match_forward(toks, i + 1, end, "[", "]");
                bool single = close == i + 3 &&
                              (toks[i + 2].kind == TokKind::Number ||
                               toks[i + 2].kind == TokKind::Ident);
                bool assigned = close + 1 < end &&
                                is_punct(toks[close + 1], "=");
                if (assigned) {
                    f.defs.push_back(t.text);
                } else if (single && toks[i + 2].kind == TokKind::Number) {
                    f.uses.push_back(t.text + "[" + toks[i + 2].text + "]");
                    f.uses.push_back(t.text);
                    used(i) = 1;
                    i = close; // index constant already captured
                    continue;
                } else {
                    f.uses.push_back(t.text);
                }
                used(i) = 1;
                continue;
            }
        }

        // out-parameter: &name as a call argument defines name
        if (prev && is_punct(*prev, "&")) {
            bool unary = i < begin + 2 ||
                         (toks[i - 2].kind == TokKind::Punct &&
                          toks[i - 2].text != ")" && toks[i - 2].text != "]");
            if (unary) {
                f.defs.push_back(t.text);
                used(i) = 1;
                continue;
            }
        }
        if (prev && (is_punct(*prev, "++") || is_punct(*prev, "--"))) {
            f.defs.push_back(t.text);
            f.uses.push_back(t.text);
            used(i) = 1;
            continue;
        }

        // a bare identifier as a call argument may be written through
        // (out-parameter passed by pointer decay), so treat it as both
        bool bareArg = prev && next &&
                       (is_punct(*prev, "(") || is_punct(*prev, ",")) &&
                       (is_punct(*next, ")") || is_punct(*next, ","));
        if (bareArg)
            f.defs.push_back(t.text);
        f.uses.push_back(t.text);
        used(i) = 1;
    }

    sort_unique(f.defs);
    sort_unique(f.uses);
    sort_unique(f.callees);
    return f;
}

SourceLoc loc_of(const Token& t, const std::string& file) {
    return SourceLoc{file, t.line, t.col};
}

std::vector<std::pair<std::size_t, std::size_t>>
split_top_commas(const std::vector<Token>& toks, std::size_t begin,
                 std::size_t end) {
    std::vector<std::pair<std::size_t, std::size_t>> groups;
    int depth = 0;
    std::size_t start = begin;
    for (std::size_t i = begin; i < end; ++i) {
        const Token& t = toks[i];
        if (is_punct(t, "(") || is_punct(t, "[") || is_punct(t, "{") ||
            is_punct(t, "<"))
            ++depth;
        else if (is_punct(t, ")") || is_punct(t, "]") || is_punct(t, "}") ||
                 is_punct(t, ">"))
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

std::vector<NativeParam> parse_params(const std::vector<Token>& toks,
                                      std::size_t begin, std::size_t end) {
    std::vector<NativeParam> params;
    for (auto [b, e] : split_top_commas(toks, begin, end)) {
        std::string name;
        for (std::size_t i = e; i-- > b;) {
            if (toks[i].kind == TokKind::Ident && !is_keyword(toks[i])) {
                name = toks[i].text;
                break;
            }
        }
        if (name.empty())
            continue;
        params.push_back(NativeParam{name, lex::render(toks, b, e)});
    }
    return params;
}

bool is_control(const std::string& s) {
    return s == "if" || s == "while" || s == "for" || s == "switch" ||
           s == "catch";
}

std::vector<NativeStatement> split_body(const std::vector<Token>& toks,
                                        std::size_t begin, std::size_t end,
                                        const std::string& file) {
    std::vector<NativeStatement> out;
    auto emit = [&](std::size_t b, std::size_t e) {
        if (b >= e)
            return;
        StmtFacts facts = analyze_statement(toks, b, e);
        NativeStatement st;
        st.loc = loc_of(toks[b], file);
        st.text = lex::render(toks, b, e);
        st.defs = std::move(facts.defs);
        st.uses = std::move(facts.uses);
        st.callees = std::move(facts.callees);
        st.comparison = facts.comparison;
        if (toks[b].kind == TokKind::Ident && toks[b].text == "return")
            st.kind = NodeKind::Return;
        else if (!st.callees.empty())
            st.kind = NodeKind::Call;
        else
            st.kind = NodeKind::Statement;
        out.push_back(std::move(st));
    };

    std::size_t i = begin;
    while (i < end) {
        const Token& t = toks[i];
        if (is_punct(t, "{") || is_punct(t, "}") || is_punct(t, ";")) {
            ++i;
            continue;
        }
        if (t.kind == TokKind::Ident &&
            (t.text == "else" || t.text == "do" || t.text == "try")) {
            ++i;
            continue;
        }
        if (t.kind == TokKind::Ident && is_control(t.text)) {
            std::size_t open = i + 1;
            if (open < end && is_punct(toks[open], "(")) {
                std::size_t close = match_forward(toks, open, end, "(", ")");
                emit(i, std::min(close + 1, end));
                i = close + 1;
            } else {
                ++i;
            }
            continue;
        }
        // plain statement up to the next top-level semicolon
        std::size_t j = i;
        int depth = 0;
        while (j < end) {
            if (is_punct(toks[j], "(") || is_punct(toks[j], "[") ||
                is_punct(toks[j], "{"))
                ++depth;
            else if (is_punct(toks[j], ")") || is_punct(toks[j], "]") ||
                     is_punct(toks[j], "}"))
                --depth;
            else if (depth == 0 && is_punct(toks[j], ";"))
                break;
            ++j;
        }
        emit(i, j);
        i = j + 1;
    }
    return out;
}

} // namespace

CppParseResult parse_native(const std::string& source,
                            const std::string& path) {
    CppParseResult result;
    result.file = path;
    std::vector<Token> toks = lex::tokenize_cpp(source, &result.includes);
    std::size_t end = toks.size();
    while (end > 0 && toks[end - 1].kind == TokKind::End)
        --end;

    // aggregate initializers: name = { ... } and name[] = { ... }
    for (std::size_t i = 0; i + 1 < end; ++i) {
        if (!is_punct(toks[i], "=") || !is_punct(toks[i + 1], "{"))
            continue;
        std::size_t n = i;
        if (n > 0 && is_punct(toks[n - 1], "]")) {
            int depth = 0;
            while (n-- > 0) {
                if (is_punct(toks[n], "]"))
                    ++depth;
                else if (is_punct(toks[n], "[") && --depth == 0)
                    break;
            }
        }
        if (n == 0 || toks[n - 1].kind != TokKind::Ident ||
            is_keyword(toks[n - 1]))
            continue;
        std::size_t close = match_forward(toks, i + 1, end, "{", "}");
        if (close == end)
            continue;
        std::vector<Token> body(toks.begin() + i + 1,
                                toks.begin() + close + 1);
        result.initializers[toks[n - 1].text] = std::move(body);
    }

    // every call expression in the file, including nested ones
    for (std::size_t i = 0; i < end; ++i) {
        if (!is_punct(toks[i], "("))
            continue;
        CalleeChain chain;
        if (!callee_before(toks, i, 0, chain))
            continue;
        std::size_t close = match_forward(toks, i, end, "(", ")");
        if (close == end)
            continue;
        CppCallSite site;
        site.callee = chain.normalized;
        site.args.assign(toks.begin() + i + 1, toks.begin() + close);
        site.loc = loc_of(toks[chain.begin], path);
        result.callSites.push_back(std::move(site));
    }

    // function definitions: Name(params) { ... } outside control headers
    std::size_t i = 0;
    while (i < end) {
        if (toks[i].kind == TokKind::Ident && toks[i].text == "NAN_METHOD" &&
            i + 4 < end && is_punct(toks[i + 1], "(") &&
            toks[i + 2].kind == TokKind::Ident &&
            is_punct(toks[i + 3], ")") && is_punct(toks[i + 4], "{")) {
            std::size_t close = match_forward(toks, i + 4, end, "{", "}");
            NativeFunction fn;
            fn.symbol = toks[i + 2].text;
            fn.params.push_back(
                NativeParam{"info", "const Nan::FunctionCallbackInfo&"});
            fn.loc = loc_of(toks[i], path);
            fn.body = split_body(toks, i + 5, close, path);
            result.functions.push_back(std::move(fn));
            i = close == end ? end : close + 1;
            continue;
        }
        if (!is_punct(toks[i], "(")) {
            ++i;
            continue;
        }
        CalleeChain chain;
        if (!callee_before(toks, i, 0, chain)) {
            ++i;
            continue;
        }
        std::size_t close = match_forward(toks, i, end, "(", ")");
        if (close == end || close + 1 >= end ||
            !is_punct(toks[close + 1], "{")) {
            ++i;
            continue;
        }
        // exclude lambdas and assigned expressions
        if (chain.begin > 0 && (is_punct(toks[chain.begin - 1], "=") ||
                                is_punct(toks[chain.begin - 1], "(") ||
                                is_punct(toks[chain.begin - 1], ",") ||
                                is_punct(toks[chain.begin - 1], "return")))
            {
            ++i;
            continue;
        }
        std::size_t bodyClose = match_forward(toks, close + 1, end, "{", "}");
        NativeFunction fn;
        fn.symbol = chain.segments.back();
        std::size_t lt = fn.symbol.find('<');
        if (lt != std::string::npos)
            fn.symbol.resize(lt);
        fn.params = parse_params(toks, i + 1, close);
        fn.loc = loc_of(toks[chain.begin], path);
        fn.body = split_body(toks, close + 2, bodyClose, path);
        result.functions.push_back(std::move(fn));
        i = bodyClose == end ? end : bodyClose + 1;
    }

    return result;
}

CppParseResult parse_native_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_native(buf.str(), path);
}

FunctionGraph build_native_dfg(const NativeFunction& fn) {
    FunctionGraph g(fn.symbol);
    GraphNode root;
    root.id = 0;
    root.language = Language::Native;
    root.kind = NodeKind::FunctionDef;
    root.label = fn.symbol;
    root.loc = fn.loc;
    root.roles = RoleRoot;
    g.add_node(std::move(root));
    g.set_root(0);

    int id = 1;
    for (const NativeStatement& st : fn.body) {
        GraphNode n;
        n.id = id++;
        n.language = Language::Native;
        n.kind = st.kind;
        n.label = st.text;
        n.loc = st.loc;
        g.add_node(std::move(n));
    }

    std::set<std::tuple<int, int, std::string>> seen;
    auto link = [&](int from, int to, const std::string& var) {
        if (from == to)
            return;
        if (!seen.emplace(from, to, var).second)
            return;
        g.add_edge(FlowEdge{from, to, var, EdgeKind::DefUse});
    };

    // root feeds every statement touching a parameter or an indexed
    // argument slot
    for (std::size_t s = 0; s < fn.body.size(); ++s) {
        const NativeStatement& st = fn.body[s];
        int sid = static_cast<int>(s) + 1;
        for (const NativeParam& p : fn.params) {
            bool touches =
                std::find(st.uses.begin(), st.uses.end(), p.name) !=
                    st.uses.end() ||
                std::find(st.defs.begin(), st.defs.end(), p.name) !=
                    st.defs.end();
            if (touches)
                link(0, sid, p.name);
        }
        for (const std::string& u : st.uses) {
            std::size_t br = u.find('[');
            if (br == std::string::npos)
                continue;
            std::string base = u.substr(0, br);
            if (base == "args" || base == "info" || base == "argv")
                link(0, sid, u);
        }
    }

    for (std::size_t a = 0; a < fn.body.size(); ++a) {
        for (std::size_t b = 0; b < fn.body.size(); ++b) {
            if (a == b)
                continue;
            for (const std::string& d : fn.body[a].defs) {
                if (std::find(fn.body[b].uses.begin(), fn.body[b].uses.end(),
                              d) != fn.body[b].uses.end())
                    link(static_cast<int>(a) + 1, static_cast<int>(b) + 1, d);
            }
        }
    }
    return g;
}

namespace {

void scan_pairs(const std::vector<Token>& toks,
                std::vector<std::pair<std::string, Token>>& out) {
    // Inside each brace group: a string literal as the FIRST element pairs
    // with the next element's rightmost plausible identifier. Literal ...
    // placeholders and NULL slots are skipped by the element walk itself.
    static const std::unordered_set<std::string> skip{
        "NULL",  "nullptr", "napi_default", "napi_enumerable",
        "napi_writable", "napi_configurable", "PyCFunction",
        "PyModuleDef_HEAD_INIT", "PyObject", "void"};

    struct Level {
        int element = 0;
        std::string pending;
    };
    std::vector<Level> stack{Level{}};
    std::string elemIdent;
    bool elemHasStr = false;
    std::string elemStr;

    auto flush = [&]() {
        Level& top = stack.back();
        if (top.element == 0 && elemHasStr && elemIdent.empty()) {
            top.pending = strip_quotes(elemStr);
        } else if (!top.pending.empty() && !elemIdent.empty()) {
            out.emplace_back(top.pending, Token{});
            out.back().second.text = elemIdent;
            top.pending.clear();
        }
        ++top.element;
        elemIdent.clear();
        elemHasStr = false;
        elemStr.clear();
    };

    for (const Token& t : toks) {
        if (is_punct(t, "{")) {
            stack.push_back(Level{});
            elemIdent.clear();
            elemHasStr = false;
        } else if (is_punct(t, "}")) {
            flush();
            if (stack.size() > 1)
                stack.pop_back();
            elemIdent.clear();
            elemHasStr = false;
        } else if (is_punct(t, ",")) {
            flush();
        } else if (t.kind == TokKind::Str) {
            elemHasStr = true;
            elemStr = t.text;
        } else if (t.kind == TokKind::Ident && !skip.count(t.text) &&
                   t.text.rfind("METH_", 0) != 0 &&
                   t.text.rfind("napi_", 0) != 0) {
            elemIdent = t.text;
        }
    }
    flush();
}

void collect_table_pairs(
    const CppParseResult& parsed, const std::vector<Token>& toks, int depth,
    std::vector<std::pair<std::string, Token>>& out) {
    std::size_t before = out.size();
    scan_pairs(toks, out);
    if (out.size() > before || depth >= 3)
        return;
    // no inline entries; follow identifiers into named initializers
    for (const Token& t : toks) {
        if (t.kind != TokKind::Ident)
            continue;
        auto it = parsed.initializers.find(t.text);
        if (it != parsed.initializers.end())
            collect_table_pairs(parsed, it->second, depth + 1, out);
    }
}

// locates the identifier of the callback inside a Nan registration:
// ...New<FunctionTemplate>(Symbol)...
std::string nan_symbol(const std::vector<Token>& args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i].kind != TokKind::Ident ||
            args[i].text != "FunctionTemplate")
            continue;
        for (std::size_t j = i + 1; j < args.size(); ++j) {
            if (is_punct(args[j], "(")) {
                for (std::size_t k = j + 1; k < args.size(); ++k) {
                    if (args[k].kind == TokKind::Ident)
                        return args[k].text;
                    if (!is_punct(args[k], "("))
                        break;
                }
                break;
            }
        }
    }
    return {};
}

std::string first_string(const std::vector<Token>& args) {
    for (const Token& t : args)
        if (t.kind == TokKind::Str)
            return strip_quotes(t.text);
    return {};
}

std::string last_segment(const std::string& callee) {
    std::size_t pos = callee.rfind("::");
    return pos == std::string::npos ? callee : callee.substr(pos + 2);
}

} // namespace

std::vector<BindingEntry> extract_bindings(
    const CppParseResult& parsed, std::vector<std::string>* diagnostics) {
    std::vector<BindingEntry> out;
    std::set<std::tuple<std::string, std::string, ApiStyle>> seen;
    auto add = [&](const std::string& name, const std::string& symbol,
                   ApiStyle style, const SourceLoc& loc) {
        if (name.empty() || symbol.empty())
            return;
        if (!seen.emplace(name, symbol, style).second)
            return;
        out.push_back(BindingEntry{name, symbol, style, loc});
    };
    auto note = [&](const std::string& msg) {
        if (diagnostics)
            diagnostics->push_back(msg);
    };

    for (const CppCallSite& site : parsed.callSites) {
        std::string tail = last_segment(site.callee);

        if (tail == "Set") {
            std::string symbol = nan_symbol(site.args);
            if (symbol.empty())
                continue;
            std::string name = first_string(site.args);
            if (name.empty()) {
                note(site.loc.str() + ": Set() with non-literal export name");
                continue;
            }
            add(name, symbol, ApiStyle::Nan, site.loc);
            continue;
        }

        if (tail == "NODE_SET_METHOD") {
            auto groups = split_top_commas(site.args, 0, site.args.size());
            if (groups.size() < 3)
                continue;
            std::string name, symbol;
            for (std::size_t k = groups[1].first; k < groups[1].second; ++k)
                if (site.args[k].kind == TokKind::Str)
                    name = strip_quotes(site.args[k].text);
            for (std::size_t k = groups[2].first; k < groups[2].second; ++k)
                if (site.args[k].kind == TokKind::Ident)
                    symbol = site.args[k].text;
            if (name.empty()) {
                note(site.loc.str() +
                     ": NODE_SET_METHOD with non-literal export name");
                continue;
            }
            add(name, symbol, ApiStyle::Nan, site.loc);
            continue;
        }

        if (tail == "rb_define_method" ||
            tail == "rb_define_module_function" ||
            tail == "rb_define_singleton_method" ||
            tail == "rb_define_global_function") {
            auto groups = split_top_commas(site.args, 0, site.args.size());
            std::size_t nameIdx =
                tail == "rb_define_global_function" ? 0 : 1;
            if (groups.size() <= nameIdx + 1)
                continue;
            std::string name;
            auto [nb, ne] = groups[nameIdx];
            if (ne == nb + 1 && site.args[nb].kind == TokKind::Str)
                name = strip_quotes(site.args[nb].text);
            if (name.empty()) {
                note(site.loc.str() + ": " + tail +
                     " with non-literal method name");
                continue;
            }
            std::string symbol;
            auto [sb, se] = groups[nameIdx + 1];
            for (std::size_t k = sb; k < se; ++k)
                if (site.args[k].kind == TokKind::Ident &&
                    !is_keyword(site.args[k]))
                    symbol = site.args[k].text;
            add(name, symbol, ApiStyle::Ruby, site.loc);
            continue;
        }

        if (tail == "napi_define_properties") {
            std::vector<std::pair<std::string, Token>> pairs;
            collect_table_pairs(parsed, site.args, 0, pairs);
            for (auto& [name, tok] : pairs)
                add(name, tok.text, ApiStyle::NApi, site.loc);
            continue;
        }

        if (tail == "PyModule_Create" || tail == "PyModule_Create2") {
            std::vector<std::pair<std::string, Token>> pairs;
            collect_table_pairs(parsed, site.args, 0, pairs);
            for (auto& [name, tok] : pairs)
                add(name, tok.text, ApiStyle::Python, site.loc);
            continue;
        }
    }
    return out;
}

std::vector<std::string> statement_callees(const std::string& text) {
    std::vector<Token> toks = lex::tokenize_cpp(text);
    std::size_t end = toks.size();
    while (end > 0 && toks[end - 1].kind == TokKind::End)
        --end;
    return analyze_statement(toks, 0, end).callees;
}

void tag_native_roles(FunctionGraph& graph, const RuleSet& rules) {
    for (GraphNode& n : graph.mutable_nodes()) {
        if (n.kind == NodeKind::FunctionDef)
            continue;
        std::vector<Token> toks = lex::tokenize_cpp(n.label);
        std::size_t end = toks.size();
        while (end > 0 && toks[end - 1].kind == TokKind::End)
            --end;
        StmtFacts f = analyze_statement(toks, 0, end);

        for (const std::string& c : f.callees) {
            for (const CallPattern& p : rules.nativeSinks)
                if (p.matches(c))
                    n.roles |= RoleSink;
            for (const CallPattern& p : rules.nativeSanitizers)
                if (p.matches(c))
                    n.roles |= RoleSanitizer;
        }
        if (f.comparison) {
            bool argCount =
                std::find(f.uses.begin(), f.uses.end(), "argc") !=
                f.uses.end();
            for (const std::string& c : f.callees)
                if (c == "info::Length" || c == "args::Length")
                    argCount = true;
            if (argCount)
                n.roles |= RoleSanitizer;
        }
    }
}

} // namespace xbound
