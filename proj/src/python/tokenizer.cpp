#include "hydra/python/tokenizer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace hydra::python {

namespace {

constexpr std::array<std::string_view, 35> kKeywords = {
    "False", "None",   "True",    "and",      "as",       "assert", "async", "await", "break",
    "class", "continue", "def",   "del",      "elif",     "else",   "except", "finally", "for",
    "from",  "global", "if",      "import",   "in",       "is",     "lambda", "nonlocal", "not",
    "or",    "pass",   "raise",   "return",   "try",      "while",  "with",   "yield"};

constexpr std::array<std::string_view, 4> kOps3 = {"**=", "//=", ">>=", "<<="};
constexpr std::array<std::string_view, 20> kOps2 = {"**", "//", ">>", "<<", "<=", ">=", "==", "!=", "->", ":=",
                                                    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "@=", "<>"};
constexpr std::string_view kOps1 = "+-*/%@&|^~<>()[]{},:.;=!";

bool is_ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool is_ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

bool is_string_prefix(std::string_view p) {
    if (p.empty() || p.size() > 2) return false;
    std::string lower;
    for (char c : p) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return lower == "r" || lower == "u" || lower == "b" || lower == "f" || lower == "br" || lower == "rb" ||
           lower == "fr" || lower == "rf";
}

class Lexer {
public:
    Lexer(std::string_view src, const TokenizeOptions& opt) : src_(src), opt_(opt) {
        line_starts_.push_back(0);
        for (std::size_t i = 0; i < src_.size(); ++i) {
            if (src_[i] == '\n') {
                line_starts_.push_back(i + 1);
            } else if (src_[i] == '\r') {
                if (i + 1 < src_.size() && src_[i + 1] == '\n') ++i;
                line_starts_.push_back(i + 1);
            }
        }
        indents_.push_back(opt_.first_line_indent);
    }

    std::vector<Token> run() {
        if (src_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
        bool first_line = true;
        while (true) {
            if (at_line_start_ && brackets_.empty()) {
                if (!handle_indentation(first_line)) break;  // EOF
                first_line = false;
            }
            if (!scan_line_tokens()) break;
        }
        finish();
        return std::move(tokens_);
    }

private:
    Position position(std::size_t off) const {
        auto it = std::upper_bound(line_starts_.begin(), line_starts_.end(), off);
        auto line_idx = static_cast<int>(it - line_starts_.begin()) - 1;
        Position p;
        p.offset = off + opt_.base_offset;
        p.line = line_idx + opt_.base_line;
        p.col = static_cast<int>(off - line_starts_[static_cast<std::size_t>(line_idx)]);
        if (line_idx == 0) p.col += opt_.base_col;
        return p;
    }

    int line_of(std::size_t off) const { return position(off).line; }

    [[noreturn]] void fail(std::size_t off, const std::string& msg) const { throw SyntaxError(line_of(off), msg); }

    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    bool at_eof() const { return pos_ >= src_.size(); }

    bool is_newline_char(char c) const { return c == '\n' || c == '\r'; }

    void skip_newline() {
        if (peek() == '\r' && peek(1) == '\n') pos_ += 2;
        else ++pos_;
    }

    Token& emit(TokenType type, std::size_t begin, std::size_t end) {
        Token t;
        t.type = type;
        t.text = src_.substr(begin, end - begin);
        t.begin = position(begin);
        t.end = position(end);
        tokens_.push_back(std::move(t));
        return tokens_.back();
    }

    // Measures indentation of a new logical line, skipping blank and
    // comment-only lines. Returns false at EOF.
    bool handle_indentation(bool first_line) {
        while (true) {
            if (at_eof()) return false;
            int width = first_line ? opt_.first_line_indent : 0;
            while (!at_eof()) {
                char c = peek();
                if (c == ' ') ++width;
                else if (c == '\t') width = (width / 8 + 1) * 8;
                else if (c == '\f') width = 0;
                else break;
                ++pos_;
            }
            first_line = false;
            char c = peek();
            if (at_eof()) return false;
            if (c == '#') {
                while (!at_eof() && !is_newline_char(peek())) ++pos_;
            }
            if (is_newline_char(peek())) {
                skip_newline();
                continue;
            }
            if (c == '\\' && is_newline_char(peek(1))) {
                // Continuation on an otherwise blank line: treat as part of this line.
                ++pos_;
                skip_newline();
                at_line_start_ = false;
                apply_indent(width);
                return true;
            }
            apply_indent(width);
            at_line_start_ = false;
            return true;
        }
    }

    void apply_indent(int width) {
        if (width > indents_.back()) {
            indents_.push_back(width);
            emit(TokenType::Indent, pos_, pos_);
        } else if (width < indents_.back()) {
            while (width < indents_.back()) {
                indents_.pop_back();
                if (indents_.empty()) fail(pos_, "unindent below the block's base indentation");
                emit(TokenType::Dedent, pos_, pos_);
            }
            if (width != indents_.back()) fail(pos_, "unindent does not match any outer indentation level");
        }
    }

    // Scans tokens until the end of the physical line. Returns false at EOF.
    bool scan_line_tokens() {
        while (true) {
            if (at_eof()) return false;
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\f') {
                ++pos_;
                continue;
            }
            if (c == '#') {
                while (!at_eof() && !is_newline_char(peek())) ++pos_;
                continue;
            }
            if (c == '\\') {
                if (is_newline_char(peek(1))) {
                    ++pos_;
                    skip_newline();
                    continue;
                }
                if (pos_ + 1 >= src_.size()) {
                    ++pos_;
                    continue;
                }
                fail(pos_, "unexpected character after line continuation character");
            }
            if (is_newline_char(c)) {
                std::size_t begin = pos_;
                skip_newline();
                if (brackets_.empty()) {
                    if (!tokens_.empty() && tokens_.back().type != TokenType::Newline) {
                        emit(TokenType::Newline, begin, begin);
                    }
                    at_line_start_ = true;
                    return true;
                }
                continue;
            }
            scan_token();
        }
    }

    void scan_token() {
        std::size_t begin = pos_;
        auto uc = static_cast<unsigned char>(peek());
        if (is_ident_start(uc)) {
            while (!at_eof() && is_ident_char(static_cast<unsigned char>(peek()))) ++pos_;
            std::string_view word = src_.substr(begin, pos_ - begin);
            if ((peek() == '\'' || peek() == '"') && is_string_prefix(word)) {
                bool fstr = word.find_first_of("fF") != std::string_view::npos;
                std::vector<FieldRange> fields;
                scan_string(begin, fstr, &fields);
                Token& t = emit(TokenType::String, begin, pos_);
                t.fstring = fstr;
                t.fields = std::move(fields);
                return;
            }
            emit(TokenType::Name, begin, pos_);
            return;
        }
        if (std::isdigit(uc) || (uc == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
            scan_number();
            emit(TokenType::Number, begin, pos_);
            return;
        }
        if (uc == '\'' || uc == '"') {
            scan_string(begin, false, nullptr);
            emit(TokenType::String, begin, pos_);
            return;
        }
        if (src_.substr(pos_, 3) == "...") {
            pos_ += 3;
            emit(TokenType::Op, begin, pos_);
            return;
        }
        for (auto op : kOps3) {
            if (src_.substr(pos_, 3) == op) {
                pos_ += 3;
                emit(TokenType::Op, begin, pos_);
                return;
            }
        }
        for (auto op : kOps2) {
            if (src_.substr(pos_, 2) == op) {
                pos_ += 2;
                emit(TokenType::Op, begin, pos_);
                return;
            }
        }
        if (kOps1.find(static_cast<char>(uc)) != std::string_view::npos) {
            char c = static_cast<char>(uc);
            if (c == '(' || c == '[' || c == '{') {
                brackets_.push_back(c);
            } else if (c == ')' || c == ']' || c == '}') {
                char open = c == ')' ? '(' : (c == ']' ? '[' : '{');
                if (brackets_.empty() || brackets_.back() != open)
                    fail(pos_, std::string("unmatched '") + c + "'");
                brackets_.pop_back();
            }
            ++pos_;
            emit(TokenType::Op, begin, pos_);
            return;
        }
        fail(pos_, std::string("invalid character '") + static_cast<char>(uc) + "'");
    }

    void scan_number() {
        auto digit_run = [&](auto pred) {
            while (!at_eof() && (pred(static_cast<unsigned char>(peek())) || peek() == '_')) ++pos_;
        };
        auto dec = [](unsigned char c) { return std::isdigit(c) != 0; };
        if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X' || peek(1) == 'o' || peek(1) == 'O' ||
                              peek(1) == 'b' || peek(1) == 'B')) {
            pos_ += 2;
            digit_run([](unsigned char c) { return std::isxdigit(c) != 0; });
            return;
        }
        digit_run(dec);
        if (peek() == '.') {
            ++pos_;
            digit_run(dec);
        }
        if ((peek() == 'e' || peek() == 'E') &&
            (std::isdigit(static_cast<unsigned char>(peek(1))) ||
             ((peek(1) == '+' || peek(1) == '-') && std::isdigit(static_cast<unsigned char>(peek(2)))))) {
            pos_ += 2;
            digit_run(dec);
        }
        if (peek() == 'j' || peek() == 'J' || peek() == 'l' || peek() == 'L') ++pos_;
    }

    // pos_ is at the prefix start or quote; on return pos_ is past the closing quote.
    void scan_string(std::size_t begin, bool fstring, std::vector<FieldRange>* fields) {
        while (peek() != '\'' && peek() != '"') ++pos_;
        char q = peek();
        bool triple = peek(1) == q && peek(2) == q;
        pos_ += triple ? 3 : 1;
        while (true) {
            if (at_eof()) fail(begin, triple ? "unterminated triple-quoted string literal" : "unterminated string literal");
            char c = peek();
            if (c == '\\') {
                ++pos_;
                if (at_eof()) continue;
                if (fstring && (peek() == '{' || peek() == '}')) continue;
                if (is_newline_char(peek())) skip_newline();
                else ++pos_;
                continue;
            }
            if (!triple && is_newline_char(c)) fail(begin, "unterminated string literal");
            if (c == q) {
                if (!triple) {
                    ++pos_;
                    return;
                }
                if (peek(1) == q && peek(2) == q) {
                    pos_ += 3;
                    return;
                }
                ++pos_;
                continue;
            }
            if (fstring && c == '{') {
                if (peek(1) == '{') {
                    pos_ += 2;
                    continue;
                }
                ++pos_;
                scan_field(begin, fields);
                continue;
            }
            if (fstring && c == '}' && peek(1) == '}') {
                pos_ += 2;
                continue;
            }
            if (is_newline_char(c)) skip_newline();
            else ++pos_;
        }
    }

    // pos_ is just past an f-string '{'; consumes through the matching '}'.
    void scan_field(std::size_t string_begin, std::vector<FieldRange>* fields) {
        std::size_t expr_begin = pos_;
        std::size_t expr_end = std::string_view::npos;
        int depth = 0;
        while (true) {
            if (at_eof()) fail(string_begin, "unterminated f-string replacement field");
            char c = peek();
            if (c == '\'' || c == '"') {
                std::size_t pb = pos_;
                while (pb > expr_begin && is_ident_char(static_cast<unsigned char>(src_[pb - 1]))) --pb;
                std::string_view prefix = src_.substr(pb, pos_ - pb);
                bool nested_f = is_string_prefix(prefix) && prefix.find_first_of("fF") != std::string_view::npos;
                std::vector<FieldRange> nested;
                scan_string(pb, nested_f, &nested);
                continue;
            }
            if (c == '(' || c == '[' || c == '{') {
                ++depth;
                ++pos_;
                continue;
            }
            if (c == ')' || c == ']') {
                --depth;
                ++pos_;
                continue;
            }
            if (c == '}') {
                if (depth == 0) {
                    if (expr_end == std::string_view::npos) expr_end = pos_;
                    ++pos_;
                    break;
                }
                --depth;
                ++pos_;
                continue;
            }
            if (depth == 0 && c == '!' && peek(1) != '=') {
                if (expr_end == std::string_view::npos) expr_end = pos_;
                ++pos_;
                continue;
            }
            if (depth == 0 && c == ':') {
                if (expr_end == std::string_view::npos) expr_end = pos_;
                ++pos_;
                scan_format_spec(string_begin, fields);
                break;
            }
            if (is_newline_char(c)) skip_newline();
            else ++pos_;
        }
        if (fields) fields->push_back({expr_begin + opt_.base_offset, expr_end + opt_.base_offset});
    }

    // Format spec after ':' up to and including the closing '}' of the field.
    void scan_format_spec(std::size_t string_begin, std::vector<FieldRange>* fields) {
        while (true) {
            if (at_eof()) fail(string_begin, "unterminated f-string format spec");
            char c = peek();
            if (c == '{') {
                ++pos_;
                scan_field(string_begin, fields);
                continue;
            }
            if (c == '}') {
                ++pos_;
                return;
            }
            if (is_newline_char(c)) skip_newline();
            else ++pos_;
        }
    }

    void finish() {
        if (!brackets_.empty()) fail(src_.size(), "unexpected EOF: unclosed bracket");
        if (!tokens_.empty() && tokens_.back().type != TokenType::Newline &&
            tokens_.back().type != TokenType::Dedent) {
            emit(TokenType::Newline, src_.size(), src_.size());
        }
        while (indents_.size() > 1) {
            indents_.pop_back();
            emit(TokenType::Dedent, src_.size(), src_.size());
        }
        emit(TokenType::EndMarker, src_.size(), src_.size());
    }

    std::string_view src_;
    TokenizeOptions opt_;
    std::size_t pos_ = 0;
    std::vector<std::size_t> line_starts_;
    std::vector<int> indents_;
    std::vector<char> brackets_;
    bool at_line_start_ = true;
    std::vector<Token> tokens_;
};

}  // namespace

bool is_keyword(std::string_view word) {
    return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

std::vector<Token> tokenize(std::string_view source, const TokenizeOptions& options) {
    return Lexer(source, options).run();
}

}  // namespace hydra::python
