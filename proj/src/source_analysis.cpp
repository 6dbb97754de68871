#include "gauntlet/source_analysis.hpp"

#include "gauntlet/util.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

namespace gauntlet::analysis {

namespace {

bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

}  // namespace

std::string strip_code(const std::string& src) {
    std::string out = src;
    enum class State { code, line_comment, block_comment, str, chr, preproc } st = State::code;
    bool line_start = true;  // only whitespace seen on this line so far

    for (std::size_t i = 0; i < src.size(); ++i) {
        const char c = src[i];
        const char next = i + 1 < src.size() ? src[i + 1] : '\0';

        switch (st) {
            case State::code:
                if (c == '/' && next == '/') {
                    st = State::line_comment;
                    out[i] = ' ';
                } else if (c == '/' && next == '*') {
                    st = State::block_comment;
                    out[i] = ' ';
                } else if (c == '"') {
                    st = State::str;
                    out[i] = ' ';
                } else if (c == '\'') {
                    st = State::chr;
                    out[i] = ' ';
                } else if (c == '#' && line_start) {
                    st = State::preproc;
                    out[i] = ' ';
                }
                break;
            case State::line_comment:
                if (c == '\n') st = State::code;
                else out[i] = ' ';
                break;
            case State::block_comment:
                if (c == '*' && next == '/') {
                    out[i] = ' ';
                    out[i + 1] = ' ';
                    ++i;
                    st = State::code;
                } else if (c != '\n') {
                    out[i] = ' ';
                }
                break;
            case State::str:
                if (c == '\\' && next != '\0') {
                    out[i] = ' ';
                    if (next != '\n') out[i + 1] = ' ';
                    ++i;
                } else if (c == '"') {
                    out[i] = ' ';
                    st = State::code;
                } else if (c != '\n') {
                    out[i] = ' ';
                }
                break;
            case State::chr:
                if (c == '\\' && next != '\0') {
                    out[i] = ' ';
                    if (next != '\n') out[i + 1] = ' ';
                    ++i;
                } else if (c == '\'') {
                    out[i] = ' ';
                    st = State::code;
                } else if (c != '\n') {
                    out[i] = ' ';
                }
                break;
            case State::preproc:
                if (c == '\n') {
                    // backslash continuation keeps the directive going
                    std::size_t j = i;
                    while (j > 0 && (src[j - 1] == ' ' || src[j - 1] == '\t')) --j;
                    if (j == 0 || src[j - 1] != '\\') st = State::code;
                } else if (c == '/' && next == '*') {
                    // comments inside directives end with the directive anyway
                    out[i] = ' ';
                } else {
                    out[i] = ' ';
                }
                break;
        }
        if (c == '\n') line_start = true;
        else if (!std::isspace(static_cast<unsigned char>(c))) line_start = false;
    }
    return out;
}

std::vector<Token> tokenize(const std::string& stripped) {
    std::vector<Token> tokens;
    int line = 1;
    for (std::size_t i = 0; i < stripped.size();) {
        const char c = stripped[i];
        if (c == '\n') {
            ++line;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < stripped.size() && ident_char(stripped[j])) ++j;
            tokens.push_back({Token::Kind::identifier, stripped.substr(i, j - i), line});
            i = j;
            continue;
        }
        tokens.push_back({Token::Kind::punct, std::string(1, c), line});
        ++i;
    }
    return tokens;
}

std::vector<Include> find_includes(const std::string& src) {
    static const std::regex re(R"(^\s*#\s*include\s*([<"])([^>"]+)[>"])");
    std::vector<Include> found;
    int line = 1;
    std::size_t pos = 0;
    while (pos <= src.size()) {
        std::size_t eol = src.find('\n', pos);
        if (eol == std::string::npos) eol = src.size();
        const std::string l = src.substr(pos, eol - pos);
        std::smatch m;
        if (std::regex_search(l, m, re)) found.push_back({m[2].str(), line, m[1].str() == "<"});
        if (eol == src.size()) break;
        pos = eol + 1;
        ++line;
    }
    return found;
}

namespace {

bool in_list(const std::vector<std::string>& list, const std::string& s) {
    return std::find(list.begin(), list.end(), s) != list.end();
}

bool has_prefix(const std::vector<std::string>& prefixes, const std::string& s) {
    if (prefixes.empty()) return true;
    for (const auto& p : prefixes)
        if (util::starts_with(s, p)) return true;
    return false;
}

bool next_is_open_paren(const std::vector<Token>& tokens, std::size_t i) {
    return i + 1 < tokens.size() && tokens[i + 1].kind == Token::Kind::punct &&
           tokens[i + 1].text == "(";
}

}  // namespace

std::vector<CallSite> scan_callsites(const std::string& stripped, const CallScanOptions& opts) {
    const auto tokens = tokenize(stripped);
    std::vector<CallSite> calls;
    std::vector<int> legacy_statements;
    std::vector<int> wrapper_stack;  // paren depth at which a check macro opened
    bool wrapper_pending = false;
    int brace_depth = 0, paren_depth = 0, stmt = 0;

    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const Token& t = tokens[i];
        if (t.kind == Token::Kind::identifier) {
            if (!next_is_open_paren(tokens, i) || brace_depth == 0) continue;
            if (in_list(opts.check_macros, t.text)) {
                wrapper_pending = true;
            } else if (in_list(opts.legacy_macros, t.text)) {
                legacy_statements.push_back(stmt);
            } else if (!in_list(opts.ignore, t.text) && has_prefix(opts.prefixes, t.text)) {
                calls.push_back({t.text, t.line, stmt, !wrapper_stack.empty(), false});
            }
            continue;
        }
        const char p = t.text[0];
        switch (p) {
            case '(':
                ++paren_depth;
                if (wrapper_pending) {
                    wrapper_stack.push_back(paren_depth);
                    wrapper_pending = false;
                }
                break;
            case ')':
                if (!wrapper_stack.empty() && wrapper_stack.back() == paren_depth)
                    wrapper_stack.pop_back();
                --paren_depth;
                break;
            case '{':
                ++brace_depth;
                ++stmt;
                break;
            case '}':
                --brace_depth;
                ++stmt;
                break;
            case ';':
                if (paren_depth == 0) ++stmt;
                break;
            default:
                break;
        }
    }

    for (auto& c : calls) {
        if (c.wrapped) continue;
        for (int ls : legacy_statements) {
            if (ls == c.statement || ls == c.statement + 1) {
                c.legacy = true;
                break;
            }
        }
    }
    return calls;
}

std::vector<SymbolCall> find_symbol_calls(const std::string& stripped, const std::string& symbol) {
    const auto tokens = tokenize(stripped);
    std::vector<SymbolCall> out;
    int brace_depth = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const Token& t = tokens[i];
        if (t.kind == Token::Kind::punct) {
            if (t.text == "{") ++brace_depth;
            else if (t.text == "}") --brace_depth;
            continue;
        }
        if (t.text == symbol && next_is_open_paren(tokens, i) && brace_depth >= 1)
            out.push_back({t.line, static_cast<int>(i)});
    }
    return out;
}

bool defines_function(const std::string& stripped, const std::string& name) {
    const auto tokens = tokenize(stripped);
    int brace_depth = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const Token& t = tokens[i];
        if (t.kind == Token::Kind::punct) {
            if (t.text == "{") ++brace_depth;
            else if (t.text == "}") --brace_depth;
            continue;
        }
        if (t.text == name && brace_depth == 0 && next_is_open_paren(tokens, i)) return true;
    }
    return false;
}

bool uses_identifier(const std::string& stripped, const std::string& ident) {
    for (const auto& t : tokenize(stripped))
        if (t.kind == Token::Kind::identifier && t.text == ident) return true;
    return false;
}

std::vector<RankGuard> find_rank_guards(const std::string& stripped, const std::string& rank_token) {
    const auto tokens = tokenize(stripped);
    const std::string needle = util::to_lower(rank_token);
    std::vector<RankGuard> guards;

    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (tokens[i].kind != Token::Kind::identifier || tokens[i].text != "if") continue;
        if (!next_is_open_paren(tokens, i)) continue;

        // condition tokens
        std::size_t j = i + 1;  // '('
        int depth = 0;
        bool rankish = false;
        for (; j < tokens.size(); ++j) {
            if (tokens[j].kind == Token::Kind::punct) {
                if (tokens[j].text == "(") ++depth;
                else if (tokens[j].text == ")") {
                    --depth;
                    if (depth == 0) break;
                }
            } else if (util::to_lower(tokens[j].text).find(needle) != std::string::npos) {
                rankish = true;
            }
        }
        if (j >= tokens.size()) break;
        if (!rankish) continue;

        RankGuard guard{tokens[i].line, {}};
        // guarded region: block or single statement
        std::size_t k = j + 1;
        if (k < tokens.size() && tokens[k].kind == Token::Kind::punct && tokens[k].text == "{") {
            int bd = 0;
            for (; k < tokens.size(); ++k) {
                if (tokens[k].kind == Token::Kind::punct) {
                    if (tokens[k].text == "{") ++bd;
                    else if (tokens[k].text == "}") {
                        --bd;
                        if (bd == 0) break;
                    }
                } else if (next_is_open_paren(tokens, k)) {
                    guard.guarded_calls.push_back(tokens[k].text);
                }
            }
        } else {
            int pd = 0;
            for (; k < tokens.size(); ++k) {
                if (tokens[k].kind == Token::Kind::punct) {
                    if (tokens[k].text == "(") ++pd;
                    else if (tokens[k].text == ")") --pd;
                    else if (tokens[k].text == ";" && pd == 0) break;
                } else if (next_is_open_paren(tokens, k)) {
                    guard.guarded_calls.push_back(tokens[k].text);
                }
            }
        }
        guards.push_back(std::move(guard));
    }
    return guards;
}

}  // namespace gauntlet::analysis
