#ifndef XBOUND_LEX_HPP
#define XBOUND_LEX_HPP

#include <string>
#include <vector>

namespace xbound::lex {

enum class TokKind { Ident, Number, Str, Punct, End };

struct Token {
    TokKind kind = TokKind::End;
    std::string text;
    int line = 1;  // 1-based
    int col = 0;   // 0-based
};

// C/C++ tokenizer. Comments are dropped, preprocessor lines are skipped
// (with backslash continuations); #include targets are reported through
// `includes` when non-null.
std::vector<Token> tokenize_cpp(const std::string& source,
                                std::vector<std::string>* includes = nullptr);

// JavaScript tokenizer. Template strings become single opaque Str tokens;
// regex literals are consumed conservatively.
std::vector<Token> tokenize_js(const std::string& source);

// Joins token texts with minimal spacing, for statement snippets.
std::string render(const std::vector<Token>& toks, std::size_t begin,
                   std::size_t end);

} // namespace xbound::lex

#endif
