#pragma once

#include <string_view>

#include "hydra/python/ast.hpp"

namespace hydra::python {

/// Parses a whole source file with top-level error recovery.
ParseResult parse_module(std::string_view source, const TokenizeOptions& options = {});

/// Parses source strictly; throws SyntaxError on the first error.
Node parse_module_strict(std::string_view source, const TokenizeOptions& options = {});

/// Parses a single expression (used for f-string replacement fields).
Node parse_expression(std::string_view source, const TokenizeOptions& options = {});

/// Removes the common leading whitespace of all non-blank lines.
std::string dedent(std::string_view text);

}  // namespace hydra::python
