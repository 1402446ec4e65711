#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hydra::python {

/// Position of a byte in the source: 0-based byte offset, 1-based line, 0-based byte column.
struct Position {
    std::size_t offset = 0;
    int line = 1;
    int col = 0;
};

class SyntaxError : public std::runtime_error {
public:
    SyntaxError(int line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line), message_(message) {}
    int line() const { return line_; }
    const std::string& message() const { return message_; }

private:
    int line_;
    std::string message_;
};

enum class TokenType : std::uint8_t { Name, Number, String, Op, Newline, Indent, Dedent, EndMarker };

/// A byte range inside an f-string token holding a replacement-field expression.
struct FieldRange {
    std::size_t begin = 0;
    std::size_t end = 0;
};

struct Token {
    TokenType type = TokenType::EndMarker;
    std::string_view text;  // view into the tokenized source
    Position begin;
    Position end;
    bool fstring = false;
    std::vector<FieldRange> fields;  // absolute offsets, f-strings only

    bool is_op(std::string_view op) const { return type == TokenType::Op && text == op; }
    bool is_name(std::string_view name) const { return type == TokenType::Name && text == name; }
};

struct TokenizeOptions {
    /// Indentation width of the first line, for source that was cut out of a
    /// larger file mid-line (a method's text starts at its `def`).
    int first_line_indent = 0;
    /// Offset/line added to every reported position.
    std::size_t base_offset = 0;
    int base_line = 1;
    int base_col = 0;
};

/// Lexes Python 3 source into logical-line tokens (comments and blank lines
/// dropped, INDENT/DEDENT synthesized). Throws SyntaxError on lexical errors.
std::vector<Token> tokenize(std::string_view source, const TokenizeOptions& options = {});

bool is_keyword(std::string_view word);

}  // namespace hydra::python
