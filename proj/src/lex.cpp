#include "xbound/lex.hpp"

#include <cctype>

namespace xbound::lex {

namespace {

bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}
bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

struct Cursor {
    const std::string& src;
    std::size_t i = 0;
    int line = 1;
    int col = 0;

    bool done() const { return i >= src.size(); }
    char peek(std::size_t ahead = 0) const {
        return i + ahead < src.size() ? src[i + ahead] : '\0';
    }
    char advance() {
        char c = src[i++];
        if (c == '\n') {
            ++line;
            col = 0;
        } else {
            ++col;
        }
        return c;
    }
};

// Longest-match punctuation set shared by both languages; extras that only
// one language uses are harmless in the other.
const char* kPuncts3[] = {"...", "===", "!==", "<<=", ">>=", "**=", "=>>"};
const char* kPuncts2[] = {"::", "->", "<<", ">>", "<=", ">=", "==", "!=",
                          "&&", "||", "+=", "-=", "*=", "/=", "%=", "&=",
                          "|=", "^=", "++", "--", "=>", "?."};

Token make(TokKind k, std::string text, int line, int col) {
    return Token{k, std::move(text), line, col};
}

void lex_string(Cursor& cur, std::vector<Token>& out, char quote) {
    int line = cur.line, col = cur.col;
    std::string text;
    text.push_back(cur.advance());
    while (!cur.done()) {
        char c = cur.advance();
        text.push_back(c);
        if (c == '\\' && !cur.done()) {
            text.push_back(cur.advance());
            continue;
        }
        if (c == quote)
            break;
    }
    out.push_back(make(TokKind::Str, std::move(text), line, col));
}

void lex_number(Cursor& cur, std::vector<Token>& out) {
    int line = cur.line, col = cur.col;
    std::string text;
    while (!cur.done() &&
           (std::isalnum(static_cast<unsigned char>(cur.peek())) ||
            cur.peek() == '.' || cur.peek() == '\'')) {
        // stop a trailing member access like 0.toString rather than 0.5
        if (cur.peek() == '.' &&
            !std::isdigit(static_cast<unsigned char>(cur.peek(1))))
            break;
        text.push_back(cur.advance());
    }
    out.push_back(make(TokKind::Number, std::move(text), line, col));
}

bool lex_punct(Cursor& cur, std::vector<Token>& out) {
    int line = cur.line, col = cur.col;
    for (const char* p : kPuncts3) {
        if (cur.src.compare(cur.i, 3, p) == 0) {
            cur.advance(); cur.advance(); cur.advance();
            out.push_back(make(TokKind::Punct, p, line, col));
            return true;
        }
    }
    for (const char* p : kPuncts2) {
        if (cur.src.compare(cur.i, 2, p) == 0) {
            cur.advance(); cur.advance();
            out.push_back(make(TokKind::Punct, p, line, col));
            return true;
        }
    }
    out.push_back(make(TokKind::Punct, std::string(1, cur.advance()), line, col));
    return true;
}

bool skip_comment(Cursor& cur) {
    if (cur.peek() == '/' && cur.peek(1) == '/') {
        while (!cur.done() && cur.peek() != '\n')
            cur.advance();
        return true;
    }
    if (cur.peek() == '/' && cur.peek(1) == '*') {
        cur.advance(); cur.advance();
        while (!cur.done() && !(cur.peek() == '*' && cur.peek(1) == '/'))
            cur.advance();
        if (!cur.done()) {
            cur.advance(); cur.advance();
        }
        return true;
    }
    return false;
}

void lex_ident(Cursor& cur, std::vector<Token>& out) {
    int line = cur.line, col = cur.col;
    std::string text;
    while (!cur.done() && ident_char(cur.peek()))
        text.push_back(cur.advance());
    out.push_back(make(TokKind::Ident, std::move(text), line, col));
}

} // namespace

std::vector<Token> tokenize_cpp(const std::string& source,
                                std::vector<std::string>* includes) {
    std::vector<Token> out;
    Cursor cur{source};
    while (!cur.done()) {
        char c = cur.peek();
        if (std::isspace(static_cast<unsigned char>(c))) {
            cur.advance();
            continue;
        }
        if (skip_comment(cur))
            continue;
        bool lineStart = true;
        for (std::size_t k = cur.i; k-- > 0;) {
            if (source[k] == '\n')
                break;
            if (!std::isspace(static_cast<unsigned char>(source[k]))) {
                lineStart = false;
                break;
            }
        }
        if (c == '#' && lineStart) {
            // preprocessor line; keep #include targets for the inventory
            std::string dir;
            while (!cur.done() && cur.peek() != '\n') {
                if (cur.peek() == '\\' && cur.peek(1) == '\n') {
                    cur.advance();
                    cur.advance();
                    continue;
                }
                dir.push_back(cur.advance());
            }
            if (includes && dir.rfind("#include", 0) == 0) {
                std::size_t b = dir.find_first_of("<\"", 8);
                if (b != std::string::npos) {
                    char close = dir[b] == '<' ? '>' : '"';
                    std::size_t e = dir.find(close, b + 1);
                    if (e != std::string::npos)
                        includes->push_back(dir.substr(b + 1, e - b - 1));
                }
            }
            continue;
        }
        if (c == '"' || c == '\'') {
            lex_string(cur, out, c);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            lex_number(cur, out);
            continue;
        }
        if (ident_start(c)) {
            lex_ident(cur, out);
            continue;
        }
        lex_punct(cur, out);
    }
    out.push_back(make(TokKind::End, "", cur.line, cur.col));
    return out;
}

namespace {

bool regex_can_follow(const std::vector<Token>& out) {
    if (out.empty())
        return true;
    const Token& t = out.back();
    if (t.kind == TokKind::Ident)
        return t.text == "return" || t.text == "typeof" || t.text == "case";
    if (t.kind == TokKind::Punct)
        return t.text != ")" && t.text != "]";
    return false;
}

} // namespace

std::vector<Token> tokenize_js(const std::string& source) {
    std::vector<Token> out;
    Cursor cur{source};
    while (!cur.done()) {
        char c = cur.peek();
        if (std::isspace(static_cast<unsigned char>(c))) {
            cur.advance();
            continue;
        }
        if (skip_comment(cur))
            continue;
        if (c == '"' || c == '\'' || c == '`') {
            lex_string(cur, out, c); // template strings stay opaque
            continue;
        }
        if (c == '/' && cur.peek(1) != '/' && cur.peek(1) != '*' &&
            regex_can_follow(out)) {
            int line = cur.line, col = cur.col;
            std::string text;
            text.push_back(cur.advance());
            bool inClass = false;
            while (!cur.done()) {
                char r = cur.advance();
                text.push_back(r);
                if (r == '\\' && !cur.done()) {
                    text.push_back(cur.advance());
                    continue;
                }
                if (r == '[')
                    inClass = true;
                else if (r == ']')
                    inClass = false;
                else if (r == '/' && !inClass)
                    break;
                else if (r == '\n')
                    break; // not a regex after all; give up gracefully
            }
            out.push_back(make(TokKind::Str, std::move(text), line, col));
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            lex_number(cur, out);
            continue;
        }
        if (ident_start(c)) {
            lex_ident(cur, out);
            continue;
        }
        lex_punct(cur, out);
    }
    out.push_back(make(TokKind::End, "", cur.line, cur.col));
    return out;
}

std::string render(const std::vector<Token>& toks, std::size_t begin,
                   std::size_t end) {
    std::string out;
    for (std::size_t i = begin; i < end && i < toks.size(); ++i) {
        const Token& t = toks[i];
        if (t.kind == TokKind::End)
            break;
        if (!out.empty()) {
            char last = out.back();
            char next = t.text.empty() ? '\0' : t.text[0];
            bool lastWord = ident_char(last);
            bool nextWord = ident_char(next) || next == '"' || next == '\'';
            if (lastWord && nextWord)
                out.push_back(' ');
        }
        out += t.text;
    }
    return out;
}

} // namespace xbound::lex
