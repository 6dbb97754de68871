#pragma once

#include <string>
#include <vector>

namespace gauntlet::analysis {

// Lightweight lexing over C-family source. Good enough for convention
// checks; not a parser. All scanners work on text with comments, string
// literals, and preprocessor lines blanked out (newlines preserved).

struct Token {
    enum class Kind { identifier, punct };
    Kind kind;
    std::string text;  // identifier text, or single punct char
    int line;          // 1-based
};

// Blanks comments, string/char literals, and preprocessor directives
// (including continuation lines). Byte positions and line numbers are
// preserved.
std::string strip_code(const std::string& src);

std::vector<Token> tokenize(const std::string& stripped);

struct Include {
    std::string path;
    int line;
    bool angled;
};

// Scans the raw (unstripped) source for #include directives.
std::vector<Include> find_includes(const std::string& src);

struct CallSite {
    std::string callee;
    int line;
    int statement;   // coarse statement index within the file
    bool wrapped;    // lexically inside a check-macro argument list
    bool legacy;     // check via legacy macro in the same or next statement
};

struct CallScanOptions {
    std::vector<std::string> prefixes;       // callsite filter; empty = all
    std::vector<std::string> check_macros;   // e.g. PetscCall
    std::vector<std::string> legacy_macros;  // e.g. CHKERRQ
    std::vector<std::string> ignore;         // identifiers never counted
};

// Identifier-followed-by-'(' inside any brace body. Definitions and
// prototypes at file scope are not callsites.
std::vector<CallSite> scan_callsites(const std::string& stripped, const CallScanOptions& opts);

// Counts calls of one exact symbol (brace depth >= 1), in token order.
struct SymbolCall {
    int line;
    int order;  // token index, usable for before/after comparison
};
std::vector<SymbolCall> find_symbol_calls(const std::string& stripped, const std::string& symbol);

// True if the file defines a function named `name` at file scope.
bool defines_function(const std::string& stripped, const std::string& name);

// True if the identifier appears anywhere in the stripped code.
bool uses_identifier(const std::string& stripped, const std::string& ident);

// One `if` whose condition references a rank-like identifier, with the
// calls found inside the guarded statement or block.
struct RankGuard {
    int line;
    std::vector<std::string> guarded_calls;
};
std::vector<RankGuard> find_rank_guards(const std::string& stripped, const std::string& rank_token);

}  // namespace gauntlet::analysis
